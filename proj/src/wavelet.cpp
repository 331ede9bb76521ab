#include "ecg/wavelet.hpp"
#include "ecg/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ecg {

namespace {

constexpr int kSegments = 4; // equal subintervals of [0,1], C1 at the knots

void check_pattern(const Pattern& p) {
    if (p.values.size() < 8) throw ParameterError("pattern needs at least 8 samples");
    bool any_nonzero = false;
    for (double v : p.values) {
        if (!std::isfinite(v)) throw ParameterError("pattern contains a non-finite value");
        if (v != 0.0) any_nonzero = true;
    }
    if (!any_nonzero) throw ParameterError("pattern must not be identically zero");
}

// Linear resampling of a uniform [0,1] sequence onto grid_n points.
std::vector<double> resample(const std::vector<double>& v, int grid_n) {
    const int n = static_cast<int>(v.size());
    if (n == grid_n) return v;
    std::vector<double> out(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        const double pos = static_cast<double>(i) * (n - 1) / (grid_n - 1);
        const int j = std::min(static_cast<int>(pos), n - 2);
        const double f = pos - j;
        out[i] = v[j] * (1.0 - f) + v[j + 1] * f;
    }
    return out;
}

// Rows evaluate the piecewise-monomial basis at the grid points; columns
// are (segment, local power) pairs.
Eigen::MatrixXd design_matrix(int grid_n, int order) {
    const int cols = kSegments * (order + 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(grid_n, cols);
    for (int i = 0; i < grid_n; ++i) {
        const double t = static_cast<double>(i) / (grid_n - 1);
        int seg = std::min(static_cast<int>(t * kSegments), kSegments - 1);
        const double u = t * kSegments - seg;
        double pw = 1.0;
        for (int m = 0; m <= order; ++m) {
            a(i, seg * (order + 1) + m) = pw;
            pw *= u;
        }
    }
    return a;
}

// Homogeneous constraints: zero endpoints, C0/C1 continuity at interior
// knots, and zero mean over the grid.
Eigen::MatrixXd constraint_matrix(const Eigen::MatrixXd& a, int order) {
    const int cols = kSegments * (order + 1);
    const int rows = 2 + 2 * (kSegments - 1) + 1;
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(rows, cols);
    int row = 0;
    // psi(0) = 0: segment 0 at u = 0
    e(row++, 0) = 1.0;
    // psi(1) = 0: segment kSegments-1 at u = 1
    for (int m = 0; m <= order; ++m) e(row, (kSegments - 1) * (order + 1) + m) = 1.0;
    ++row;
    for (int k = 1; k < kSegments; ++k) {
        const int left = (k - 1) * (order + 1);
        const int right = k * (order + 1);
        // value continuity: sum_m c_left[m] - c_right[0] = 0
        for (int m = 0; m <= order; ++m) e(row, left + m) = 1.0;
        e(row, right + 0) = -1.0;
        ++row;
        // slope continuity (equal subintervals, so du scaling cancels)
        for (int m = 1; m <= order; ++m) e(row, left + m) = static_cast<double>(m);
        e(row, right + 1) = -1.0;
        ++row;
    }
    // zero mean over the grid
    e.row(row) = a.colwise().sum();
    return e;
}

Eigen::VectorXd solve_projection(const Pattern& p, int order, int grid_n) {
    check_pattern(p);
    if (order < 2) throw ParameterError("polynomial order must be at least 2");
    if (grid_n < 4 * (order + 1))
        throw ParameterError("grid_n must be at least 4*(order+1)");

    const Eigen::MatrixXd a = design_matrix(grid_n, order);
    const Eigen::MatrixXd e = constraint_matrix(a, order);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
    const Eigen::MatrixXd z = lu.kernel(); // admissible coefficient directions
    if (z.cols() == 0) throw FitError("constraint set admits no wavelet");

    Eigen::VectorXd target(grid_n);
    const std::vector<double> pv = resample(p.values, grid_n);
    for (int i = 0; i < grid_n; ++i) target(i) = pv[i];

    const Eigen::MatrixXd az = a * z;
    const Eigen::VectorXd y = az.colPivHouseholderQr().solve(target);
    return az * y; // grid values of the projection
}

} // namespace

double WaveletKernel::sample(double u) const {
    if (u < 0.0 || u > 1.0) return 0.0;
    const double pos = u * (grid_n - 1);
    const int i = std::min(static_cast<int>(pos), grid_n - 2);
    const double f = pos - i;
    return values[i] * (1.0 - f) + values[i + 1] * f;
}

Pattern default_qrs_pattern(int grid_n) {
    if (grid_n < 32) throw ParameterError("default pattern needs grid_n >= 32");
    Pattern p;
    p.values.resize(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        const double t = static_cast<double>(i) / (grid_n - 1);
        const double pos = (t - 0.45) / 0.08;
        const double neg = (t - 0.60) / 0.10;
        p.values[i] = std::exp(-0.5 * pos * pos) - 0.55 * std::exp(-0.5 * neg * neg);
    }
    return p;
}

std::vector<double> fit_pattern_projection(const Pattern& p, int order, int grid_n) {
    const Eigen::VectorXd psi = solve_projection(p, order, grid_n);
    return std::vector<double>(psi.data(), psi.data() + psi.size());
}

WaveletKernel fit_adaptive_wavelet(const Pattern& p, int order, int grid_n) {
    const Eigen::VectorXd psi = solve_projection(p, order, grid_n);

    const double dt = 1.0 / (grid_n - 1);
    const double energy = psi.squaredNorm() * dt;
    const double pattern_scale = [&] {
        double s = 0.0;
        for (double v : p.values) s += v * v;
        return s / p.values.size();
    }();
    if (energy <= 1e-12 * std::max(pattern_scale, 1e-300))
        throw FitError("pattern projects to (near) zero: constrained fit is degenerate");

    WaveletKernel k;
    k.grid_n = grid_n;
    k.values.resize(grid_n);
    const double scale = 1.0 / std::sqrt(energy);
    for (int i = 0; i < grid_n; ++i) k.values[i] = psi(i) * scale;
    return k;
}

CwtCoefficients cwt(const SampledSignal& x, const WaveletKernel& k, double scale) {
    if (!(scale >= 1.0)) throw ParameterError("cwt scale must be at least 1 sample");
    const int n = x.size();
    if (scale > n) throw ParameterError("cwt scale exceeds the signal length");

    // Taps of the dilated kernel, centered: tap j is psi(j/scale + 1/2).
    const int j_hi = static_cast<int>(std::floor(scale / 2.0));
    const int j_lo = -j_hi;
    std::vector<double> taps(j_hi - j_lo + 1);
    for (int j = j_lo; j <= j_hi; ++j) taps[j - j_lo] = k.sample(j / scale + 0.5);

    CwtCoefficients w;
    w.scale = scale;
    w.coeffs.assign(n, 0.0);
    w.valid_range.first = j_hi;
    w.valid_range.last = n - 1 - j_hi;
    if (w.valid_range.last < w.valid_range.first)
        throw ParameterError("cwt scale leaves no border-free coefficients");

    const double inv_sqrt_scale = 1.0 / std::sqrt(scale);
    for (int b = 0; b < n; ++b) {
        const int lo = std::max(j_lo, -b);
        const int hi = std::min(j_hi, n - 1 - b);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += taps[j - j_lo] * x.samples[b + j];
        w.coeffs[b] = acc * inv_sqrt_scale;
    }
    return w;
}

std::pair<CwtCoefficients, CwtCoefficients>
cwt_two_levels(const SampledSignal& x, const WaveletKernel& k, double base_scale) {
    return {cwt(x, k, base_scale), cwt(x, k, 2.0 * base_scale)};
}

Pattern load_pattern_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pattern file: " + path);
    Pattern p;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        // either "value" or "position,value" rows
        const std::size_t comma = line.find(',');
        const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            std::size_t pos = 0;
            double v = std::stod(field, &pos);
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
            p.values.push_back(v);
        } catch (const std::exception&) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected a number, got '" + field + "'");
        }
    }
    check_pattern(p);
    return p;
}

void write_kernel_csv(const WaveletKernel& k, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open kernel file for writing: " + path);
    char buf[96];
    for (int i = 0; i < k.grid_n; ++i) {
        const double t = static_cast<double>(i) / (k.grid_n - 1);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, k.values[i]);
        out << buf;
    }
    if (!out) throw IoError("failed writing kernel file: " + path);
}

} // namespace ecg
