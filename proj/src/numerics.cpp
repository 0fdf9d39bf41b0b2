#include "bfp/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace bfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;  // log(sqrt(2*pi))
constexpr double kInvE = 0.367879441171442321595523770161;        // 1/e

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

double std_normal_cdf(double x) noexcept {
    const double p = 0.5 * std::erfc(-x * 0.70710678118654752440);
    return std::clamp(p, 0.0, 1.0);
}

double std_normal_log_pdf(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

// Wichura (1988), algorithm AS 241, PPND16.
double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("std_normal_quantile: p must lie in (0, 1), got " + fmt(p));

    const double q = p - 0.5;
    double x;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        x = q *
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
    } else {
        double r = q < 0.0 ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        if (r <= 5.0) {
            r -= 1.6;
            x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
        } else {
            r -= 5.0;
            x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
        }
        if (q < 0.0) x = -x;
    }

    // One Newton polish on Phi(x) - p.
    const double pdf = std::exp(std_normal_log_pdf(x));
    if (pdf > 0.0) x -= (std_normal_cdf(x) - p) / pdf;
    return x;
}

namespace {

// Series expansion of both real branches around the branch point -1/e,
// parameterised by p = +-sqrt(2 (1 + e y)).
double lambert_branch_series(double p) {
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
}

double lambert_halley(double w, double y) {
    for (int i = 0; i < 50; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - y;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        if (denom == 0.0 || !std::isfinite(denom)) break;
        const double step = f / denom;
        w -= step;
        if (std::fabs(step) <= 1e-14 * (1.0 + std::fabs(w))) break;
    }
    return w;
}

}  // namespace

double lambert_w(double y, Branch branch) {
    const double offset = y + kInvE;  // distance to the branch point
    if (branch == Branch::Principal) {
        if (offset < -4e-16)
            throw std::domain_error("lambert_w: principal branch requires y >= -1/e, got y = " + fmt(y));
        if (y == 0.0) return 0.0;
        if (offset <= 0.0) return -1.0;
        if (offset < 1e-5) return lambert_branch_series(std::sqrt(2.0 * std::exp(1.0) * offset));
        double w;
        if (y < -0.30)
            w = lambert_branch_series(std::sqrt(2.0 * std::exp(1.0) * offset));
        else if (y < 1.0)
            w = y * (1.0 + y * (-1.0 + y * (1.5 - 8.0 / 3.0 * y)));
        else {
            const double l1 = std::log(y), l2 = std::log(std::log(y));
            w = y <= std::exp(1.0) ? 0.5 + 0.3 * y : l1 - l2 + l2 / l1;
        }
        return lambert_halley(w, y);
    }
    if (offset < -4e-16 || y >= 0.0)
        throw std::domain_error("lambert_w: non-principal branch requires -1/e <= y < 0, got y = " + fmt(y));
    if (offset <= 0.0) return -1.0;
    if (offset < 1e-5) return lambert_branch_series(-std::sqrt(2.0 * std::exp(1.0) * offset));
    double w;
    if (y > -0.27) {
        const double l1 = std::log(-y);
        w = l1 - std::log(-l1);
    } else {
        w = lambert_branch_series(-std::sqrt(2.0 * std::exp(1.0) * offset));
    }
    return lambert_halley(w, y);
}

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) return h;
    }
    throw numerical_error("incomplete beta continued fraction did not converge", h);
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cont_frac(a, b, x) / a;
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double std_t_log_density(double z, double df) {
    return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
           0.5 * std::log(df * M_PI) - 0.5 * (df + 1.0) * std::log1p(z * z / df);
}

}  // namespace

double t_cdf(double x, double df) {
    if (df <= 0.0) throw std::domain_error("t_cdf: df must be positive");
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    const double xx = df / (df + x * x);
    const double tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, xx);
    return x <= 0.0 ? tail : 1.0 - tail;
}

double t_log_density(double x, double df, double location, double scale,
                     double lower, double upper) {
    if (df <= 0.0 || scale <= 0.0)
        throw std::domain_error("t_density: df and scale must be positive");
    if (!(lower < upper)) throw std::domain_error("t_density: requires lower < upper");
    const double mass = t_cdf((upper - location) / scale, df) -
                        t_cdf((lower - location) / scale, df);
    if (!(mass >= 1e-300))
        throw numerical_error("t_density: truncation interval carries no mass", 0.0);
    if (x < lower || x > upper) return -kInf;
    const double z = (x - location) / scale;
    return std_t_log_density(z, df) - std::log(scale) - std::log(mass);
}

double t_density(double x, double df, double location, double scale,
                 double lower, double upper) {
    const double lg = t_log_density(x, df, location, scale, lower, upper);
    return lg == -kInf ? 0.0 : std::exp(lg);
}

double t_density(double x, double df, double location, double scale) {
    return t_density(x, df, location, scale, -kInf, kInf);
}

namespace {

// 64-point Gauss-Legendre rule on [-1, 1], nodes via Newton iteration.
struct Gauss64 {
    std::array<double, 64> node{}, weight{};
    Gauss64() {
        constexpr int n = 64;
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / pp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            node[i] = -x;
            node[n - 1 - i] = x;
            weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }
};

const Gauss64& gauss64() {
    static const Gauss64 g;
    return g;
}

// Integrates exp(logf(u) - shift) over [a, b] with a single 64-point panel.
template <typename F>
double gl64_exp(const F& logf, double a, double b, double shift) {
    if (!(b > a)) return 0.0;
    const auto& g = gauss64();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 64; ++i)
        s += g.weight[i] * std::exp(logf(mid + half * g.node[i]) - shift);
    return s * half;
}

}  // namespace

double nct_log_density(double x, double df, double ncp) {
    if (df <= 0.0) throw std::domain_error("nct_density: df must be positive");
    if (ncp == 0.0) return std_t_log_density(x, df);

    const double q = ncp * x * std::sqrt(2.0 / (df + x * x));
    const double log_front = -0.5 * ncp * ncp + std::lgamma(0.5 * (df + 1.0)) +
                             0.5 * df * std::log(df) - 0.5 * std::log(M_PI) -
                             std::lgamma(0.5 * df) -
                             0.5 * (df + 1.0) * std::log(df + x * x);

    if (q >= 0.0 && q < 64.0) {
        // sum_j Gamma((df+j+1)/2) / Gamma((df+1)/2) * q^j / j!, all terms
        // positive; interleaved gamma-ratio recurrence, rescaled on overflow.
        double r_even = std::exp(std::lgamma(0.5 * df + 1.0) - std::lgamma(0.5 * (df + 1.0)));
        double r_odd = 0.5 * (df + 1.0) / r_even;
        double ratio[2] = {r_even, r_odd};
        double term = 1.0, sum = 1.0;
        long scale = 0;
        const long j_max = 400000;
        long j = 0;
        for (; j < j_max; ++j) {
            const double rj = ratio[j & 1];
            term *= q * rj / (j + 1.0);
            ratio[j & 1] = rj * (df + j + 2.0) / (df + j + 1.0);
            sum += term;
            if (term < sum * 1e-18 && static_cast<double>(j) > 0.5 * q * q) break;
            if (sum > 1e250) {
                sum *= 1e-250;
                term *= 1e-250;
                ++scale;
            }
        }
        if (j == j_max)
            throw numerical_error("nct_density: series did not converge", log_front + std::log(sum));
        return log_front + std::log(sum) + scale * std::log(1e250);
    }

    // Opposite-sign regime (alternating, cancelling series) and very large q:
    // evaluate the defining scale-mixture integral f = K int_0^inf u^df
    // phi(u x - ncp) exp(-df u^2/2) du instead. The log-integrand is strictly
    // concave with a closed-form mode; quadrature panels are sized from the
    // local and global curvature bounds.
    const double log_k = std::log(2.0) + 0.5 * df * (std::log(df) - std::log(2.0)) -
                         std::lgamma(0.5 * df) - kLogSqrt2Pi;
    const double prod = ncp * x;
    const double disc = std::sqrt(prod * prod + 4.0 * df * (df + x * x));
    const double ustar = prod >= 0.0 ? (prod + disc) / (2.0 * (df + x * x))
                                     : 2.0 * df / (disc - prod);
    const auto log_integrand = [&](double u) {
        const double d = u * x - ncp;
        return df * std::log(u) - 0.5 * d * d - 0.5 * df * u * u;
    };
    const double l_star = log_integrand(ustar);
    const double sig_local = 1.0 / std::sqrt(df / (ustar * ustar) + x * x + df);
    const double sig_global = 1.0 / std::sqrt(x * x + df);
    const double lo1 = std::max(0.0, ustar - 11.0 * sig_local);
    const double lo0 = std::max(0.0, ustar - 11.0 * sig_global);
    const double hi1 = ustar + 11.0 * sig_local;
    const double hi0 = ustar + 11.0 * sig_global;
    double integral = gl64_exp(log_integrand, lo1, ustar, l_star) +
                      gl64_exp(log_integrand, ustar, hi1, l_star);
    // outer wings matter only when the curvature relaxes away from the mode
    if (lo1 > lo0 && log_integrand(lo1) - l_star > -45.0)
        integral += gl64_exp(log_integrand, lo0, lo1, l_star);
    if (hi0 > hi1 && log_integrand(hi1) - l_star > -45.0)
        integral += gl64_exp(log_integrand, hi1, hi0, l_star);
    return log_k + l_star + std::log(integral);
}

double nct_density(double x, double df, double ncp) {
    return std::exp(nct_log_density(x, df, ncp));
}

namespace {

// Gauss-Kronrod 7-15 nodes and weights (positive half).
constexpr double kGkNode[8] = {
    0.000000000000000, 0.405845151377397, 0.741531185599394, 0.949107912342759,
    0.207784955007898, 0.586087235467691, 0.864864423359769, 0.991455371120813};
constexpr double kGaussW[4] = {0.417959183673469, 0.381830050505119,
                               0.279705391489277, 0.129484966168870};
constexpr double kKronW[8] = {0.209482141084728, 0.190350578064785,
                              0.140653259715525, 0.063092092629979,
                              0.204432940075298, 0.169004726639267,
                              0.104790010322250, 0.022935322010529};

struct PanelEstimate {
    double integral;
    double error;
};

template <typename F>
PanelEstimate g7k15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double f0 = f(mid);
    double g = kGaussW[0] * f0;
    double k = kKronW[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGkNode[i];
        const double fi = f(mid + dx) + f(mid - dx);
        k += kKronW[i] * fi;
        if (i < 4) g += kGaussW[i] * fi;
    }
    g *= half;
    k *= half;
    return {k, std::fabs(k - g)};
}

// One integration segment after mapping to a finite parameter interval.
struct Segment {
    std::function<double(double)> g;
    double a, b;
};

Segment make_segment(const std::function<double(double)>& f, double lower,
                     double upper) {
    const bool lo_inf = lower == -kInf, hi_inf = upper == kInf;
    if (!lo_inf && !hi_inf) return {[&f](double x) { return f(x); }, lower, upper};
    if (lo_inf && hi_inf) {
        // x = u / (1 - u^2) on (-1, 1)
        return {[&f](double u) {
                    const double d = 1.0 - u * u;
                    return f(u / d) * (1.0 + u * u) / (d * d);
                },
                -1.0, 1.0};
    }
    if (hi_inf) {
        // x = lower + u / (1 - u) on (0, 1)
        return {[&f, lower](double u) {
                    const double d = 1.0 - u;
                    return f(lower + u / d) / (d * d);
                },
                0.0, 1.0};
    }
    // x = upper - u / (1 - u) on (0, 1)
    return {[&f, upper](double u) {
                const double d = 1.0 - u;
                return f(upper - u / d) / (d * d);
            },
            0.0, 1.0};
}

struct Panel {
    std::size_t seg;
    double a, b, integral, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

double adaptive(const std::vector<Segment>& segments, double rel_tol,
                int initial_per_segment) {
    constexpr int kMaxPanels = 4000;
    std::priority_queue<Panel> heap;
    double total = 0.0, err = 0.0;
    int panels = 0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const auto& seg = segments[s];
        const double w = (seg.b - seg.a) / initial_per_segment;
        for (int i = 0; i < initial_per_segment; ++i) {
            const double lo = seg.a + i * w;
            const double hi = i + 1 == initial_per_segment ? seg.b : seg.a + (i + 1) * w;
            const auto est = g7k15(seg.g, lo, hi);
            heap.push({s, lo, hi, est.integral, est.error});
            total += est.integral;
            err += est.error;
            ++panels;
        }
    }
    while (err > rel_tol * std::fabs(total) + 1e-300 && panels < kMaxPanels &&
           !heap.empty()) {
        const Panel p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b) {  // interval exhausted at machine precision
            err -= p.error;
            continue;
        }
        const auto& g = segments[p.seg].g;
        const auto left = g7k15(g, p.a, mid);
        const auto right = g7k15(g, mid, p.b);
        total += left.integral + right.integral - p.integral;
        err += left.error + right.error - p.error;
        heap.push({p.seg, p.a, mid, left.integral, left.error});
        heap.push({p.seg, mid, p.b, right.integral, right.error});
        ++panels;
    }
    if (err > rel_tol * std::fabs(total) + 1e-300)
        throw numerical_error("integrate: refinement budget exhausted, error " +
                                  fmt(err) + " of " + fmt(total),
                              total);
    return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lower,
                 double upper, double rel_tol) {
    if (!(rel_tol > 0.0)) throw std::domain_error("integrate: rel_tol must be positive");
    if (lower == upper) return 0.0;
    if (lower > upper) return -integrate(f, upper, lower, rel_tol);
    std::vector<Segment> segments;
    segments.push_back(make_segment(f, lower, upper));
    return adaptive(segments, rel_tol, 8);
}

double integrate_piecewise(const std::function<double(double)>& f,
                           std::span<const double> cuts, double rel_tol) {
    if (!(rel_tol > 0.0)) throw std::domain_error("integrate: rel_tol must be positive");
    if (cuts.size() < 2) throw std::domain_error("integrate_piecewise: needs two cuts");
    std::vector<Segment> segments;
    segments.reserve(cuts.size() - 1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i] < cuts[i + 1]))
            throw std::domain_error("integrate_piecewise: cuts must increase");
        segments.push_back(make_segment(f, cuts[i], cuts[i + 1]));
    }
    return adaptive(segments, rel_tol, 2);
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
    if (!(tol > 0.0)) throw std::domain_error("find_root: tol must be positive");
    if (lo > hi) std::swap(lo, hi);
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw numerical_error("find_root: no sign change on bracket, f(" + fmt(lo) +
                                  ") = " + fmt(flo) + ", f(" + fmt(hi) + ") = " + fmt(fhi),
                              0.5 * (lo + hi));
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        if (hi - lo <= tol) break;
        double cand = kInf;
        if (it % 2 == 0 && std::isfinite(flo) && std::isfinite(fhi) && fhi != flo)
            cand = (lo * fhi - hi * flo) / (fhi - flo);  // secant through the bracket
        const double margin = 0.01 * (hi - lo);
        x = (cand > lo + margin && cand < hi - margin) ? cand : 0.5 * (lo + hi);
        const double fx = f(x);
        if (std::fabs(fx) <= tol || fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace bfp
