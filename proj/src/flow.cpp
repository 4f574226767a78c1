#include "mexp/flow.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "image_ops.hpp"
#include "mexp/simd.hpp"

namespace mexp {
namespace {

using detail::Plane;

constexpr double kPresmoothSigma = 0.8;
// Intensities are mapped jointly onto this range before solving.
constexpr double kIntensityRange = 255.0;

Plane to_plane(const Frame& f) {
    return Plane(f.width(), f.height(), std::vector<double>(f.values().begin(), f.values().end()));
}

void normalize_pair(Plane& a, Plane& b) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : a.data) lo = std::min(lo, v), hi = std::max(hi, v);
    for (double v : b.data) lo = std::min(lo, v), hi = std::max(hi, v);
    const double span = hi - lo;
    if (span <= 0.0) return;
    for (double& v : a.data) v = kIntensityRange * (v - lo) / span;
    for (double& v : b.data) v = kIntensityRange * (v - lo) / span;
}

Plane zoom_out(const Plane& in, double zoom) {
    const int w = std::max(1, static_cast<int>(in.width * zoom + 0.5));
    const int h = std::max(1, static_cast<int>(in.height * zoom + 0.5));
    const Plane smooth = detail::gaussian_blur(in, 0.6 * std::sqrt(1.0 / (zoom * zoom) - 1.0));
    Plane out(w, h);
    const double sx = static_cast<double>(in.width) / w;
    const double sy = static_cast<double>(in.height) / h;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = detail::sample_bilinear(smooth, x * sx, y * sy);
    return out;
}

// Upsamples a flow component to (w, h) and rescales it to the new pixel units.
Plane zoom_in(const Plane& in, int w, int h, double scale) {
    Plane out(w, h);
    const double sx = static_cast<double>(in.width) / w;
    const double sy = static_cast<double>(in.height) / h;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = scale * detail::sample_bilinear(in, x * sx, y * sy);
    return out;
}

Plane warp(const Plane& img, const Plane& u1, const Plane& u2) {
    Plane out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y) = detail::sample_bilinear(img, x + u1.at(x, y), y + u2.at(x, y));
    return out;
}

double forward_tv(const Plane& u) {
    double s = 0.0;
    for (int y = 0; y < u.height; ++y)
        for (int x = 0; x < u.width; ++x) {
            const double dx = x < u.width - 1 ? u.at(x + 1, y) - u.at(x, y) : 0.0;
            const double dy = y < u.height - 1 ? u.at(x, y + 1) - u.at(x, y) : 0.0;
            s += std::sqrt(dx * dx + dy * dy);
        }
    return s;
}

struct WarpSystem {
    Plane gx, gy, grad_sq, rho_c;
};

double linearized_energy(const WarpSystem& ws, const Plane& u1, const Plane& u2, double lambda) {
    double data = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i)
        data += std::abs(ws.rho_c.data[i] + ws.gx.data[i] * u1.data[i] + ws.gy.data[i] * u2.data[i]);
    return forward_tv(u1) + forward_tv(u2) + lambda * data;
}

// Solves one pyramid level in place, starting from the current (u1, u2).
void solve_level(const Plane& i0, const Plane& i1, Plane& u1, Plane& u2, const TvL1Params& params,
                 bool finest, TvL1Trace* trace) {
    const auto& k = simd::active();
    const int w = i0.width;
    const int h = i0.height;
    const std::size_t n = i0.size();

    Plane i1x, i1y;
    detail::centered_gradient(i1, i1x, i1y);

    Plane p11(w, h), p12(w, h), p21(w, h), p22(w, h);
    Plane div1(w, h), div2(w, h);
    WarpSystem ws{Plane(w, h), Plane(w, h), Plane(w, h), Plane(w, h)};

    const double eps_sq = params.stop_eps * params.stop_eps;
    for (int warp_no = 0; warp_no < params.n_warps; ++warp_no) {
        const Plane i1w = warp(i1, u1, u2);
        ws.gx = warp(i1x, u1, u2);
        ws.gy = warp(i1y, u1, u2);
        for (std::size_t i = 0; i < n; ++i) {
            const double gx = ws.gx.data[i];
            const double gy = ws.gy.data[i];
            ws.grad_sq.data[i] = gx * gx + gy * gy;
            ws.rho_c.data[i] = i1w.data[i] - gx * u1.data[i] - gy * u2.data[i] - i0.data[i];
        }

        const bool record = trace && finest && warp_no == params.n_warps - 1;
        if (record) trace->final_warp_energy.clear();

        simd::PrimalStep primal{n,
                                ws.gx.data.data(),
                                ws.gy.data.data(),
                                ws.grad_sq.data.data(),
                                ws.rho_c.data.data(),
                                div1.data.data(),
                                div2.data.data(),
                                u1.data.data(),
                                u2.data.data(),
                                params.lambda * params.theta,
                                params.theta};
        simd::DualStep dual{w,
                            h,
                            u1.data.data(),
                            u2.data.data(),
                            p11.data.data(),
                            p12.data.data(),
                            p21.data.data(),
                            p22.data.data(),
                            params.tau / params.theta};

        int iter = 0;
        double error = std::numeric_limits<double>::infinity();
        while (error > eps_sq && iter < params.n_iters) {
            ++iter;
            k.divergence(w, h, p11.data.data(), p12.data.data(), div1.data.data());
            k.divergence(w, h, p21.data.data(), p22.data.data(), div2.data.data());
            error = k.tvl1_primal(primal) / static_cast<double>(n);
            k.tvl1_dual(dual);
            if (record) trace->final_warp_energy.push_back(linearized_energy(ws, u1, u2, params.lambda));
        }
        if (trace) trace->iterations.push_back(iter);

        u1 = detail::median3x3(u1);
        u2 = detail::median3x3(u2);
    }
}

void check_finite(const Frame& f, const char* which) {
    for (double v : f.values())
        if (!std::isfinite(v)) throw InputError(std::string("estimate_tvl1: non-finite intensity in ") + which);
}

}  // namespace

void TvL1Params::validate() const {
    if (!(lambda > 0.0) || !(theta > 0.0) || !(tau > 0.0) || !(stop_eps > 0.0))
        throw ConfigError("TvL1Params: lambda, theta, tau and stop_eps must be positive");
    if (!(zoom > 0.0 && zoom < 1.0)) throw ConfigError("TvL1Params: zoom must lie in (0,1)");
    if (n_scales < 1 || n_warps < 1 || n_iters < 1)
        throw ConfigError("TvL1Params: n_scales, n_warps and n_iters must be >= 1");
}

int effective_scales(int width, int height, const TvL1Params& params) {
    int scales = 1;
    double w = width;
    double h = height;
    while (scales < params.n_scales) {
        const int nw = static_cast<int>(w * params.zoom + 0.5);
        const int nh = static_cast<int>(h * params.zoom + 0.5);
        if (std::min(nw, nh) < kMinPyramidSide) break;
        w = nw;
        h = nh;
        ++scales;
    }
    return scales;
}

FlowField estimate_tvl1(const Frame& reference, const Frame& target, const TvL1Params& params,
                        TvL1Trace* trace) {
    params.validate();
    if (reference.width() != target.width() || reference.height() != target.height())
        throw ShapeError("estimate_tvl1: frames differ in size");
    check_finite(reference, "reference");
    check_finite(target, "target");

    const int scales = effective_scales(reference.width(), reference.height(), params);
    if (trace) *trace = TvL1Trace{scales, {}, {}};

    std::vector<Plane> i0(scales), i1(scales);
    i0[0] = to_plane(reference);
    i1[0] = to_plane(target);
    normalize_pair(i0[0], i1[0]);
    i0[0] = detail::gaussian_blur(i0[0], kPresmoothSigma);
    i1[0] = detail::gaussian_blur(i1[0], kPresmoothSigma);
    for (int s = 1; s < scales; ++s) {
        i0[s] = zoom_out(i0[s - 1], params.zoom);
        i1[s] = zoom_out(i1[s - 1], params.zoom);
    }

    Plane u1(i0[scales - 1].width, i0[scales - 1].height);
    Plane u2(u1.width, u1.height);
    for (int s = scales - 1; s >= 0; --s) {
        if (s < scales - 1) {
            const int w = i0[s].width;
            const int h = i0[s].height;
            const double sx = static_cast<double>(w) / u1.width;
            const double sy = static_cast<double>(h) / u1.height;
            u1 = zoom_in(u1, w, h, sx);
            u2 = zoom_in(u2, w, h, sy);
        }
        solve_level(i0[s], i1[s], u1, u2, params, s == 0, trace);
    }
    return FlowField(reference.width(), reference.height(), std::move(u1.data), std::move(u2.data));
}

Frame warp_bilinear(const Frame& frame, const FlowField& flow) {
    if (frame.width() != flow.width() || frame.height() != flow.height())
        throw ShapeError("warp_bilinear: frame and flow differ in size");
    const Plane img = to_plane(frame);
    std::vector<double> out(frame.size());
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x)
            out[static_cast<std::size_t>(y) * frame.width() + x] =
                std::clamp(detail::sample_bilinear(img, x + flow.u_at(x, y), y + flow.v_at(x, y)), 0.0, 1.0);
    return Frame(frame.width(), frame.height(), std::move(out));
}

}  // namespace mexp
