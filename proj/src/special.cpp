#include "fracthj/special.hpp"
#include "fracthj/errors.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <unordered_map>

namespace fracthj {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lanczos coefficients, g = 607/128 (Godfrey set, ~15 significant digits).
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczosC[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

double lanczos_sum(double x) {
    double s = kLanczosC[0];
    for (int k = 1; k < 15; ++k) s += kLanczosC[k] / (x + k - 1);
    return s;
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0)) throw config_error("log_gamma: requires x > 0");
    if (x < 0.5) return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    const double t = x + kLanczosG - 0.5;
    return 0.5 * std::log(2.0 * kPi) + (x - 0.5) * std::log(t) - t +
           std::log(lanczos_sum(x));
}

double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw config_error("gamma_fn: pole at nonpositive integer");
    if (x == std::floor(x) && x <= 21.0) {
        double f = 1.0;
        for (double k = 2.0; k < x; ++k) f *= k;
        return f;  // exact factorial at small integers
    }
    if (x < 0.5) {
        // reflection
        return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
    }
    const double t = x + kLanczosG - 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, x - 0.5) * std::exp(-t) *
           lanczos_sum(x);
}

namespace {

// Taylor series sum z^n / Gamma(alpha n + b), z = -x <= 0.
double ml_series(double alpha, double b, double x, double& est_error) {
    double sum = 0.0;
    double comp = 0.0;  // Kahan
    double peak = 0.0;
    double term = 0.0;
    for (int n = 0; n < 500; ++n) {
        const double lt = (n == 0 ? 0.0 : n * std::log(x)) - log_gamma(alpha * n + b);
        term = std::exp(lt);
        if (n % 2 == 1) term = -term;
        peak = std::max(peak, std::abs(term));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (n >= 4 && std::abs(term) < 1e-18 * (std::abs(sum) + 1.0)) break;
    }
    est_error = peak * std::numeric_limits<double>::epsilon() + std::abs(term);
    return sum;
}

// Asymptotic expansion for z -> -inf: sum_{k>=1} (-1)^{k+1} x^{-k} / Gamma(b - alpha k),
// truncated at the smallest term.
bool ml_asymptotic(double alpha, double b, double x, double& value, double& est_error) {
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    double last = prev;
    for (int k = 1; k < 80; ++k) {
        const double arg = b - alpha * k;
        double inv_gamma;
        if (arg > 0.5) {
            inv_gamma = std::exp(-log_gamma(arg));
        } else if (arg <= 0.0 && arg == std::floor(arg)) {
            inv_gamma = 0.0;
        } else {
            // 1/Gamma(arg) = Gamma(1-arg) sin(pi*arg) / pi
            inv_gamma = std::exp(log_gamma(1.0 - arg)) * std::sin(kPi * arg) / kPi;
        }
        if (inv_gamma == 0.0) continue;  // Gamma pole: term vanishes identically
        const double term = ((k % 2 == 1) ? 1.0 : -1.0) * std::pow(x, -k) * inv_gamma;
        if (std::abs(term) >= prev) {  // divergent tail reached
            est_error = prev;
            value = sum;
            return prev < 1e-14 * (std::abs(sum) + 1.0 / x);
        }
        sum += term;
        prev = std::abs(term);
        last = prev;
        if (prev < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    est_error = last;
    value = sum;
    return last < 1e-14 * (std::abs(sum) + 1.0 / x);
}

double series_threshold(double alpha) { return std::pow(8.0, alpha); }

constexpr double kAsymptoticX = 50.0;

}  // namespace

MlFamily::MlFamily(double alpha, double b) : alpha_(alpha), b_(b) {
    if (!(alpha > 0.0) || alpha > 1.0) throw config_error("ml: alpha must lie in (0,1]");
    if (!(b > 0.0)) throw config_error("ml: b must be positive");
    b_reduced_ = b;
    while (alpha < 1.0 && b_reduced_ >= 1.0 + alpha - 1e-9) {
        b_reduced_ -= alpha;
        recurrence_gammas_.push_back(gamma_fn(b_reduced_));
    }
    std::reverse(recurrence_gammas_.begin(), recurrence_gammas_.end());
    if (alpha >= 1.0) return;  // classical exponential; no tables needed

    const double br = b_reduced_;
    sin_b_ = std::sin(kPi * (1.0 - br));
    sin_ba_ = std::sin(kPi * (1.0 - br + alpha));
    cos_pa_ = std::cos(kPi * alpha);

    // Trapezoid in s with u = e^s. Analyticity strip is limited by the
    // denominator zeros (width pi(1-alpha)/alpha) and the e^{-e^s} factor.
    const double strip = std::min(kPi / 2.0, kPi * (1.0 - alpha) / alpha);
    const double h = std::min(0.25, 2.0 * kPi * strip / 37.0);
    const double eps = alpha - br + 1.0;  // > 0 after reduction
    const double s_min = (std::log(1e-18) - std::log(1.0 + 1.0 / eps)) / eps - 5.0;
    const double s_max = std::log(45.0);
    const int m = static_cast<int>((s_max - s_min) / h) + 1;
    quad_u_alpha_.resize(m);
    quad_weight_.resize(m);
    for (int j = 0; j < m; ++j) {
        const double s = s_min + j * h;
        quad_u_alpha_[j] = std::exp(alpha * s);
        quad_weight_[j] = h * std::exp(eps * s - std::exp(s)) / kPi;
    }
}

double MlFamily::integral_eval(double x) const {
    double sum = 0.0;
    const size_t m = quad_weight_.size();
    for (size_t j = 0; j < m; ++j) {
        const double ua = quad_u_alpha_[j];
        const double num = ua * sin_b_ + x * sin_ba_;
        const double den = ua * ua + 2.0 * ua * x * cos_pa_ + x * x;
        sum += quad_weight_[j] * num / den;
    }
    return sum;
}

double MlFamily::operator()(double z) const {
    if (z > 0.0) throw config_error("ml: only z <= 0 is supported");
    const double x = -z;
    double est = 0.0;
    if (alpha_ >= 1.0) {
        // classical case, kept for the beta -> 1 cross-checks
        if (std::abs(b_ - std::round(b_)) < 1e-12 && b_ < 6.5) {
            // exact: E_{1,m}(z) = (e^z - sum_{k<m-1} z^k/k!) / z^{m-1}
            if (x == 0.0 || b_ < 1.5) return std::exp(z);
            double v = std::exp(z);
            for (int k = 1; k < static_cast<int>(std::round(b_)); ++k)
                v = (v - 1.0 / gamma_fn(static_cast<double>(k))) / z;
            return v;
        }
        if (x <= 2.0) return ml_series(1.0, b_, x, est);
        double v;
        if (ml_asymptotic(1.0, b_, x, v, est)) return v;
        throw config_error("ml: alpha=1 with noninteger b and large |z| unsupported");
    }
    if (x <= series_threshold(alpha_)) return ml_series(alpha_, b_, x, est);
    double v;
    if (x >= kAsymptoticX && ml_asymptotic(alpha_, b_, x, v, est)) return v;
    v = integral_eval(x);
    for (double g : recurrence_gammas_) v = (v - 1.0 / g) / z;
    return v;
}

MlEval ml(double alpha, double b, double z) {
    if (z > 0.0) throw config_error("ml: only z <= 0 is supported");
    MlEval out;
    out.alpha = alpha;
    out.b = b;
    out.z = z;
    const double x = -z;
    double est = 0.0;
    if (alpha < 1.0 && x > series_threshold(alpha)) {
        if (x >= kAsymptoticX) {
            double v;
            if (ml_asymptotic(alpha, b, x, v, est)) {
                out.value = v;
                out.method = MlEval::Method::integral;
                out.est_error = est;
                return out;
            }
        }
        MlFamily fam(alpha, b);
        out.value = fam(z);
        out.method = MlEval::Method::integral;
        out.est_error = 1e-12 * (std::abs(out.value) + 1.0);
        return out;
    }
    MlFamily fam(alpha, b);  // validates parameters
    out.value = fam(z);
    out.method = MlEval::Method::series;
    out.est_error = 1e-13 * (std::abs(out.value) + 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Mainardi density. The series is numerically delicate (alternating with a
// large peak term), so the verification quadratures run in __float128.

namespace {

struct MainardiSeries {
    std::vector<__float128> coeff;  // c_n with M(t) = sum c_n (-t)^n

    explicit MainardiSeries(double beta) {
        const __float128 qbeta = beta;
        const __float128 qpi = M_PIq;
        const int max_terms = 2000;
        coeff.reserve(600);
        for (int n = 0; n < max_terms; ++n) {
            // 1/Gamma(1 - beta(n+1)) = Gamma(beta(n+1)) sin(pi beta(n+1)) / pi;
            // reduce the sine argument to the nearest integer so Gamma poles
            // (integer y) give an exact zero instead of huge*tiny garbage
            const __float128 y = qbeta * (n + 1);
            const __float128 lg = lgammaq(y) - lgammaq(__float128(n + 1));
            const __float128 k = nearbyintq(y);
            const __float128 delta = y - k;
            const __float128 sign =
                (fmodq(fabsq(k), 2.0Q) < 0.5Q) ? 1.0Q : -1.0Q;
            const __float128 c = expq(lg) * sign * sinq(qpi * delta) / qpi;
            coeff.push_back(c);
        }
    }

    // value with an estimate of the alternating-series cancellation noise;
    // returns 0 once the tail is no longer resolvable in quad precision
    __float128 eval(__float128 t, __float128* noise_out = nullptr) const {
        __float128 sum = 0.0Q;
        __float128 p = 1.0Q;  // (-t)^n
        __float128 peak = 0.0Q;
        bool converged = false;
        int small_run = 0;  // pole coefficients are exact zeros: require a run
        for (size_t n = 0; n < coeff.size(); ++n) {
            const __float128 term = coeff[n] * p;
            sum += term;
            const __float128 a = fabsq(term);
            if (a > peak) peak = a;
            if (n > 8 && a < 1e-40Q * peak && a < 1e-45Q) {
                if (++small_run >= 4) {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
            p *= -t;
        }
        // summation noise ~ (term count) * peak * quad epsilon
        const __float128 noise = peak * 4e-31Q;
        if (noise_out) *noise_out = noise;
        if (!converged || fabsq(sum) < noise) return 0.0Q;  // unresolvable tail
        return sum;
    }
};

// Gauss-Legendre 16-point nodes/weights on (-1,1).
constexpr double kGl16X[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGl16W[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

// Integrates f over [0, t_max] in fixed-width panels with 16-point GL; the
// width must resolve the steep stretched-exponential tail at beta near 1.
template <typename F>
__float128 panel_integrate(const F& f, double t_max, double width = 0.125) {
    __float128 total = 0.0Q;
    const int panels = static_cast<int>(std::ceil(t_max / width));
    for (int p = 0; p < panels; ++p) {
        const double a = p * width;
        const double bnd = std::min<double>(a + width, t_max);
        const double mid = 0.5 * (a + bnd), half = 0.5 * (bnd - a);
        __float128 acc = 0.0Q;
        for (int i = 0; i < 8; ++i) {
            acc += __float128(kGl16W[i]) *
                   (f(__float128(mid + half * kGl16X[i])) +
                    f(__float128(mid - half * kGl16X[i])));
        }
        total += acc * __float128(half);
    }
    return total;
}

// March outward until the density is resolvably negligible or the series
// cancellation noise overtakes it (beyond which panels only add noise).
double mainardi_tail_cutoff(const MainardiSeries& series, double r) {
    double t = 1.0;
    while (t < 60.0) {
        __float128 noise = 0.0Q;
        const __float128 v = series.eval(__float128(t), &noise);
        const double av = std::abs(static_cast<double>(v));
        if (av * std::pow(t, std::max(r, 0.0)) < 1e-12) return t + 0.5;
        t += 0.5;
    }
    return 60.0;
}

// The verification quadratures evaluate the density at the same nodes for
// every moment order, so repeated calls at one beta share a per-thread memo
// of sampled values (read-only once written; reentrant per thread).
struct MainardiCache {
    double beta = -1.0;
    std::unique_ptr<MainardiSeries> series;
    std::unordered_map<double, __float128> memo;

    const MainardiSeries& for_beta(double b) {
        if (b != beta) {
            series = std::make_unique<MainardiSeries>(b);
            memo.clear();
            beta = b;
        }
        return *series;
    }
    __float128 eval(__float128 t) {
        const double key = static_cast<double>(t);
        const auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const __float128 v = series->eval(t);
        memo.emplace(key, v);
        return v;
    }
};

thread_local MainardiCache g_mainardi_cache;

}  // namespace

double mainardi_moment(double beta, double r) {
    if (!(beta > 0.0 && beta < 1.0)) throw config_error("mainardi_moment: beta in (0,1)");
    if (!(r > -1.0)) throw config_error("mainardi_moment: requires r > -1");
    return gamma_fn(r + 1.0) / gamma_fn(beta * r + 1.0);
}

double mainardi_moment_quadrature(double beta, double r) {
    if (!(beta > 0.0 && beta < 1.0)) throw config_error("mainardi_moment_quadrature: beta in (0,1)");
    if (!(r > -1.0)) throw config_error("mainardi_moment_quadrature: requires r > -1");
    MainardiCache& cache = g_mainardi_cache;
    const MainardiSeries& series = cache.for_beta(beta);
    const double t_max = mainardi_tail_cutoff(series, r);
    const __float128 qr = r;
    // [0,1] under t = s^4 so noninteger powers of t stay Gauss-friendly
    auto head = [&](__float128 s) -> __float128 {
        if (s <= 0.0Q) return 0.0Q;
        const __float128 t = s * s * s * s;
        return 4.0Q * powq(s, 4.0Q * qr + 3.0Q) * cache.eval(t);
    };
    auto tail = [&](__float128 t) -> __float128 {
        const __float128 u = t + 1.0Q;
        return powq(u, qr) * cache.eval(u);
    };
    return static_cast<double>(panel_integrate(head, 1.0) +
                               panel_integrate(tail, std::max(t_max - 1.0, 0.0)));
}

double mainardi_laplace_quadrature(double beta, double s) {
    if (!(beta > 0.0 && beta < 1.0)) throw config_error("mainardi_laplace_quadrature: beta in (0,1)");
    if (s < 0.0) throw config_error("mainardi_laplace_quadrature: requires s >= 0");
    MainardiCache& cache = g_mainardi_cache;
    cache.for_beta(beta);
    const double t_max = mainardi_tail_cutoff(*cache.series, 0.0);
    const __float128 qs = s;
    auto f = [&](__float128 t) -> __float128 { return expq(-qs * t) * cache.eval(t); };
    return static_cast<double>(panel_integrate(f, t_max));
}

}  // namespace fracthj
