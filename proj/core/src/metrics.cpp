#include "ffsrm/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ffsrm::metrics {

namespace {

double bilinear_clamped(const Image& img, double y, double x) {
    y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
    x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
    const int y0 = std::min(static_cast<int>(std::floor(y)), img.height - 2 >= 0 ? img.height - 2 : 0);
    const int x0 = std::min(static_cast<int>(std::floor(x)), img.width - 2 >= 0 ? img.width - 2 : 0);
    const double fy = y - y0;
    const double fx = x - x0;
    const int y1 = std::min(y0 + 1, img.height - 1);
    const int x1 = std::min(x0 + 1, img.width - 1);
    return (1.0 - fy) * ((1.0 - fx) * img.at(y0, x0) + fx * img.at(y0, x1)) +
           fy * ((1.0 - fx) * img.at(y1, x0) + fx * img.at(y1, x1));
}

}  // namespace

LineProfile line_profile(const Image& image, double y0_px, double x0_px,
                         double y1_px, double x1_px, int width_px) {
    if (image.pixel_count() == 0) throw std::invalid_argument("line_profile: empty image");
    if (width_px < 1 || width_px % 2 == 0)
        throw std::invalid_argument("line_profile: width must be a positive odd count");
    auto inside = [&](double y, double x) {
        return y >= -0.5 && y <= image.height - 0.5 && x >= -0.5 && x <= image.width - 0.5;
    };
    if (!inside(y0_px, x0_px) || !inside(y1_px, x1_px))
        throw std::invalid_argument("line_profile: endpoint outside the image");

    const double dy = y1_px - y0_px;
    const double dx = x1_px - x0_px;
    const double length = std::hypot(dy, dx);
    const int n = static_cast<int>(std::floor(length)) + 1;
    double uy = 0.0, ux = 1.0;
    if (length > 0.0) {
        uy = dy / length;
        ux = dx / length;
    }
    const double py = -ux;  // unit perpendicular
    const double px = uy;

    LineProfile profile;
    profile.spacing_nm = image.pixel_size_nm;
    profile.values.resize(static_cast<size_t>(n));
    const int half_w = width_px / 2;
    for (int i = 0; i < n; ++i) {
        const double cy = y0_px + i * uy;
        const double cx = x0_px + i * ux;
        double acc = 0.0;
        for (int k = -half_w; k <= half_w; ++k)
            acc += bilinear_clamped(image, cy + k * py, cx + k * px);
        profile.values[static_cast<size_t>(i)] = acc / width_px;
    }
    return profile;
}

GaussianFit gaussian_fit_fwhm(const std::vector<double>& samples,
                              double sample_spacing_nm) {
    const int n = static_cast<int>(samples.size());
    if (n < 5) throw std::invalid_argument("gaussian_fit_fwhm: need at least 5 samples");
    if (!(sample_spacing_nm > 0.0))
        throw std::invalid_argument("gaussian_fit_fwhm: spacing must be positive");

    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    if (!(span > 0.0))
        throw std::invalid_argument("gaussian_fit_fwhm: constant profile");
    if (!(*hi_it > samples.front() && *hi_it > samples.back()))
        throw std::invalid_argument("gaussian_fit_fwhm: profile has no interior peak");

    // Normalized data keeps the fit affine-invariant and well-scaled.
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = (samples[static_cast<size_t>(i)] - lo) / span;

    // Moment-based start.
    double wsum = 0.0, msum = 0.0;
    for (int i = 0; i < n; ++i) {
        wsum += y(i);
        msum += y(i) * i;
    }
    double center = wsum > 0.0 ? msum / wsum : 0.5 * (n - 1);
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += y(i) * (i - center) * (i - center);
    double sigma = std::max(std::sqrt(var / std::max(wsum, 1e-12)), 0.5);
    double amp = 1.0;
    double offset = 0.0;

    auto model = [](double amp_, double c_, double s_, double off_, double x) {
        const double z = (x - c_) / s_;
        return off_ + amp_ * std::exp(-0.5 * z * z);
    };

    double lambda = 1e-3;
    double prev_cost = -1.0;
    Eigen::VectorXd r(n);
    Eigen::MatrixXd jac(n, 4);
    bool converged = false;
    for (int iter = 0; iter < 500; ++iter) {
        double cost = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = (i - center) / sigma;
            const double e = std::exp(-0.5 * z * z);
            const double f = offset + amp * e;
            r(i) = f - y(i);
            cost += r(i) * r(i);
            jac(i, 0) = e;
            jac(i, 1) = amp * e * z / sigma;
            jac(i, 2) = amp * e * z * z / sigma;
            jac(i, 3) = 1.0;
        }
        if (prev_cost >= 0.0 && std::fabs(prev_cost - cost) <= 1e-14 * (1.0 + cost)) {
            converged = true;
            break;
        }
        prev_cost = cost;

        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        bool stepped = false;
        for (int attempt = 0; attempt < 24 && !stepped; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (int k = 0; k < 4; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
            const double amp_n = amp + delta(0);
            const double center_n = center + delta(1);
            const double sigma_n = sigma + delta(2);
            const double offset_n = offset + delta(3);
            if (!(sigma_n > 1e-6) || !std::isfinite(sigma_n)) {
                lambda *= 10.0;
                continue;
            }
            double cost_n = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = model(amp_n, center_n, sigma_n, offset_n, i) - y(i);
                cost_n += d * d;
            }
            if (cost_n < cost) {
                amp = amp_n;
                center = center_n;
                sigma = sigma_n;
                offset = offset_n;
                lambda = std::max(lambda * 0.1, 1e-12);
                stepped = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!stepped) {
            converged = true;  // no improving step exists at any damping
            break;
        }
    }

    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = model(amp, center, sigma, offset, i) - y(i);
        cost += d * d;
    }
    const double rms = std::sqrt(cost / n) * span;
    if (!converged)
        throw std::runtime_error("gaussian_fit_fwhm: no convergence after 500 iterations, rms residual " +
                                 std::to_string(rms));

    GaussianFit fit;
    fit.amplitude = amp * span;
    fit.offset = offset * span + lo;
    fit.center_samples = center;
    fit.sigma_samples = sigma;
    fit.fwhm_nm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma * sample_spacing_nm;
    fit.converged = converged;
    fit.rms_residual = rms;
    return fit;
}

std::optional<double> dip_ratio(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    if (n < 3) return std::nullopt;

    std::vector<int> maxima;
    for (int i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || values[static_cast<size_t>(i)] >= values[static_cast<size_t>(i - 1)];
        const bool right_ok = i == n - 1 || values[static_cast<size_t>(i)] >= values[static_cast<size_t>(i + 1)];
        if (left_ok && right_ok) maxima.push_back(i);
    }
    if (maxima.size() < 2) return std::nullopt;

    std::sort(maxima.begin(), maxima.end(), [&](int a, int b) {
        return values[static_cast<size_t>(a)] > values[static_cast<size_t>(b)];
    });
    int p0 = maxima[0], p1 = maxima[1];
    if (p0 > p1) std::swap(p0, p1);
    if (p1 - p0 < 2) return std::nullopt;

    double valley = values[static_cast<size_t>(p0 + 1)];
    for (int i = p0 + 1; i < p1; ++i)
        valley = std::min(valley, values[static_cast<size_t>(i)]);
    const double peaks = 0.5 * (values[static_cast<size_t>(p0)] + values[static_cast<size_t>(p1)]);
    if (!(peaks > 0.0)) return std::nullopt;
    return 1.0 - valley / peaks;
}

double sbr(const Image& image, const Rect& object, const Rect& background) {
    auto mean_of = [&](const Rect& r, const char* what) {
        if (r.height <= 0 || r.width <= 0 || r.y < 0 || r.x < 0 ||
            r.y + r.height > image.height || r.x + r.width > image.width)
            throw std::invalid_argument(std::string("sbr: ") + what + " region out of bounds");
        double acc = 0.0;
        for (int y = r.y; y < r.y + r.height; ++y)
            for (int x = r.x; x < r.x + r.width; ++x) acc += image.at(y, x);
        return acc / (static_cast<double>(r.height) * r.width);
    };
    const double obj = mean_of(object, "object");
    const double bg = mean_of(background, "background");
    if (!(bg > 0.0)) throw std::invalid_argument("sbr: background mean must be positive");
    return obj / bg;
}

Image intensity_adjust(const Image& image, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("intensity_adjust: gamma must be positive");
    double peak = 0.0;
    for (double v : image.data) peak = std::max(peak, v);
    if (!(peak > 0.0)) throw std::invalid_argument("intensity_adjust: image has no positive pixels");
    Image out = image;
    for (double& v : out.data) v = std::pow(std::max(v, 0.0) / peak, gamma);
    return out;
}

double normalized_l2_distance(const Image& a, const Image& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("normalized_l2_distance: dimension mismatch");
    double na = 0.0, nb = 0.0;
    for (double v : a.data) na += v * v;
    for (double v : b.data) nb += v * v;
    if (!(na > 0.0) || !(nb > 0.0))
        throw std::invalid_argument("normalized_l2_distance: zero image");
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] / na - b.data[i] / nb;
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace ffsrm::metrics
