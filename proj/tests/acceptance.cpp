// Acceptance run: one PASS/FAIL line per criterion, followed by indented
// detail lines. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "kolmo/experiments.hpp"
#include "kolmo/hypolab.hpp"

using namespace kolmo;

namespace {

constexpr double kIdentityTol = 1e-11;
constexpr double kMarginTol = 1e-8;
constexpr double kDecayTol = 1e-10;
constexpr double kCertificateTol = 1e-8;
constexpr double kSlopeTarget = 4.0;
constexpr double kSlopeBand = 0.2;
constexpr double kInfSupSpread = 10.0;
constexpr int kInfSupMaxDofs = 3000;
constexpr double kBracketRtol = 1e-14;
constexpr double kTemporalTol = 1e-10;
constexpr double kEocMin = 1.5;

const std::vector<int> kSweepN{2, 4, 8};
const std::vector<int> kSweepP{1, 2, 3};
const std::vector<int> kSweepQ{0, 1, 2};
const std::vector<double> kSweepK{0.1, 0.01};

int failures = 0;

void verdict(int id, bool pass, const std::string& what)
{
    std::printf("criterion %d %s: %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    failures += !pass;
}

template <class... Args>
void info(const char* fmt, Args... args)
{
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
    std::fflush(stdout);
}

std::pair<double, double> eig2(double a, double b, double c)
{
    const double m = 0.5 * (a + c);
    const double r = std::hypot(0.5 * (a - c), b);
    return {m - r, m + r};
}

void criterion1()
{
    std::mt19937_64 rng(101);
    double uw = 0.0, slab = 0.0;
    int functions = 0;
    for (const Domain& dom : {Domain{}, Domain{-1.0, 1.0, 0.0, 1.0}})
        for (int n : {1, 2, 4, 8}) {
            const Mesh m = build_rect_mesh(dom, dom.straddles_axis() ? 2 * n : n, n);
            const FaceClass fc = classify(m);
            for (int p = 0; p <= 3; ++p) {
                const DgSpace s(m, p);
                uw = std::max(uw, verify_uw_identity(m, fc, s, 100, rng));
                functions += 100;
                if (n == 8 || n == 1)
                    for (int q = 0; q <= 2; ++q)
                        slab = std::max(slab, verify_slab_energy_identity(s, q, 0.1, 100, rng));
            }
        }
    verdict(1, uw < kIdentityTol && slab < kIdentityTol, "upwind and slab time-jump identities at rounding level");
    info("upwind identity: %d random functions, max relative residual %.3e", functions, uw);
    info("slab identity: max relative residual %.3e (tolerance %.0e)", slab, kIdentityTol);
}

struct SweepInstance
{
    int n, p, q;
    double k;
    MarginReport report;
};

void criterion2(std::vector<SweepInstance>& failed)
{
    int total = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int n : kSweepN)
        for (int p : kSweepP) {
            const Discretisation d({}, n, n, p);
            for (int q : kSweepQ)
                for (double k : kSweepK) {
                    const FormSet fs = d.forms(d.full_coeffs(q, k));
                    const MarginReport r = check_fulldiscrete_coercivity(fs, temporal_forms(TemporalBasis(q, 0.0, k)), kMarginTol);
                    ++total;
                    worst = std::min(worst, r.relative());
                    if (!r.pass)
                        failed.push_back({n, p, q, k, r});
                }
        }
    verdict(2, failed.empty(), "space-time coercivity margin >= -1e-8 x scale on every sweep instance");
    info("%d instances, %zu below threshold, worst relative margin %.3e", total, failed.size(), worst);
    for (const SweepInstance& f : failed) {
        const Discretisation d({}, f.n, f.n, f.p);
        const FormSet fs = d.forms(d.full_coeffs(f.q, f.k));
        const TemporalForms tf = temporal_forms(TemporalBasis(f.q, 0.0, f.k));
        const MarginReport adj = check_fulldiscrete_coercivity(fs, tf, kMarginTol, {0.375, 1.875});
        info("fails: %dx%d p=%d q=%d k=%g relative %.3e; with jump weight 3/8 and uw weight 15/8: %.3e", f.n, f.n, f.p,
             f.q, f.k, f.report.relative(), adj.relative());
    }
}

void criterion3()
{
    double worst = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (int n : kSweepN)
        for (int p : kSweepP) {
            const Discretisation d({}, n, n, p);
            const MarginReport r = check_semi_positivity(d.forms(d.semi_coeffs()), kMarginTol);
            pass = pass && r.pass;
            worst = std::min(worst, r.relative());
        }
    verdict(3, pass, "semi-discrete joint (U, U_t) margin >= -1e-8 x scale");
    info("%zu instances, worst relative margin %.3e", kSweepN.size() * kSweepP.size(), worst);
}

void criterion4()
{
    bool positive = true, above = true, monotone = true;
    for (int p : {1, 2}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int n : kSweepN) {
            const Discretisation d({}, n, n, p);
            const GapEstimate g = estimate_kappa(d, d.semi_coeffs());
            positive = positive && g.kappa_num > 0.0;
            above = above && g.kappa_num >= g.kappa_formula;
            monotone = monotone && g.kappa_num <= prev;
            prev = g.kappa_num;
            info("%dx%d p=%d: kappa_num %.4e kappa_formula %.4e C_bPF %.4f", n, n, p, g.kappa_num, g.kappa_formula, g.c_bpf);
        }
    }
    bool slope_ok = true;
    for (int p : {1, 2}) {
        std::vector<double> h, kf, hall, kall;
        for (int n : {2, 4, 8, 16}) {
            const Discretisation d({}, n, n, p);
            const GapEstimate g = estimate_kappa_formula(d, d.semi_coeffs());
            if (!(g.delta_branch <= g.mesh_branch))
                continue;
            hall.push_back(d.mesh().element(0).h);
            kall.push_back(g.kappa_formula);
            if (n >= 4) {
                h.push_back(hall.back());
                kf.push_back(g.kappa_formula);
            }
        }
        const double slope = loglog_slope(h, kf);
        slope_ok = slope_ok && std::abs(slope - kSlopeTarget) <= kSlopeBand;
        info("p=%d: slope of kappa_formula over 4x4..16x16 %.4f (2x2..16x16: %.4f)", p, slope, loglog_slope(hall, kall));
    }
    verdict(4, positive && above && slope_ok, "kappa_num > 0, kappa_num >= kappa_formula, formula slope 4 +- 0.2");
    info("kappa_num positive %s, above formula %s, monotone under refinement %s", positive ? "yes" : "no",
         above ? "yes" : "no", monotone ? "yes" : "no");
}

void criterion5()
{
    bool pass = true;
    const Discretisation d({}, 8, 8, 2);
    const auto u0 = [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); };
    for (int q : {0, 1}) {
        const DecayReport r = decay_experiment(d, q, 0.05, 40, u0, kDecayTol);
        pass = pass && r.steps_pass && r.cumulative_pass && r.monotone_pass;
        const double worst = *std::min_element(r.step_margin.begin(), r.step_margin.end());
        info("q=%d: kappa_num %.4e, worst step margin %.3e, cumulative margin %.3e, max A-norm increase %.3e", q, r.kappa,
             worst, r.cumulative_margin, r.max_increase);
        info("q=%d: last-step contraction A %.6f, L2 %.6f; k->0 limit factor %.12f", q, r.a_factor.back(),
             r.l2_factor.back(), r.exponential_limit);
    }
    verdict(5, pass, "per-step and cumulative decay bounds, monotone A-norm (8x8, p=2, k=0.05, 40 steps)");
}

void criterion6()
{
    std::mt19937_64 rng(606);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, cert = lo;
    int run = 0, skipped = 0;
    for (int n : kSweepN)
        for (int p : kSweepP)
            for (int q : kSweepQ)
                for (double k : kSweepK) {
                    const int dofs = 2 * (q + 1) * n * n * (p + 1) * (p + 2) / 2;
                    if (dofs > kInfSupMaxDofs) {
                        ++skipped;
                        continue;
                    }
                    const Discretisation d({}, n, n, p);
                    const InfSupReport r = compute_infsup(d, q, k, 2, 100, rng);
                    ++run;
                    lo = std::min(lo, r.lambda_h);
                    hi = std::max(hi, r.lambda_h);
                    cert = std::min(cert, r.coercivity_sampled);
                }
    const bool pass = cert >= 1.0 - kCertificateTol && lo > 0.0 && hi / lo < kInfSupSpread;
    verdict(6, pass, "sampled coercivity certificate >= 1 - 1e-8, Lambda_h bounded away from 0 with spread < 10");
    info("%d instances (%d above %d dofs skipped), min sampled B(U,V(U))/|||U|||^2 %.6f", run, skipped, kInfSupMaxDofs,
         cert);
    info("Lambda_h floor %.6f, max %.6f, spread %.4f", lo, hi, hi / lo);
}

void criterion7()
{
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const double a = std::pow(10.0, -6.0 + 6.0 * u(rng));
        const double c = a * u(rng);
        const double b = (2.0 * u(rng) - 1.0) * std::sqrt(a * c);
        const SpectralBounds2x2 s = spectral_bounds(a, b, c);
        const auto [lmin, lmax] = eig2(a, b, c);
        const double slack = kBracketRtol * a;
        violations += !(s.lower <= lmin + slack && lmax <= s.upper + slack && s.upper <= 2.0 * a);
    }
    int elements = 0, bracket = 0;
    for (int n : kSweepN)
        for (int p : kSweepP) {
            const Discretisation d({}, n, n, p);
            std::vector<CoeffSet> sets{d.semi_coeffs()};
            for (int q : kSweepQ)
                for (double k : kSweepK)
                    sets.push_back(d.full_coeffs(q, k));
            for (const CoeffSet& cs : sets)
                for (const AMatrix& a : cs.a) {
                    const SpectralBounds2x2 s = spectral_bounds(a.alpha, a.beta, a.gamma);
                    const auto [lmin, lmax] = eig2(a.alpha, a.beta, a.gamma);
                    const double slack = kBracketRtol * a.alpha;
                    bracket += !(s.lower <= lmin + slack && lmax <= s.upper + slack && s.upper <= 2.0 * a.alpha);
                    ++elements;
                }
        }
    verdict(7, violations == 0 && bracket == 0, "2x2 spectral bounds bracket the closed-form eigenvalues");
    info("10000 random matrices: %d violations; %d element matrices A(delta_T): %d violations", violations, elements,
         bracket);
}

void criterion8()
{
    std::mt19937_64 rng(808);
    int violations = 0;
    for (int p = 0; p <= 4; ++p)
        for (double aspect : {1.0, 2.0}) {
            const InverseConstants c = compute_inverse_constants(p, std::span<const double>(&aspect, 1));
            const InverseSampleReport r = sample_inverse_inequalities(p, c, aspect, 10000, rng);
            violations += r.violations;
            info("p=%d aspect %.0f: C_trace %.6f C_grad %.6f, %d violations, max ratios %.12f %.12f", p, aspect, c.c_trace,
                 c.c_grad, r.violations, r.max_trace_ratio, r.max_grad_ratio);
        }
    double trace_gap = 0.0;
    bool derivative_ok = true;
    for (int q = 0; q <= 4; ++q) {
        const TemporalConstantReport t = temporal_constants_check(q, 0.05);
        trace_gap = std::max(trace_gap, std::abs(t.trace_extremal - t.trace_constant));
        derivative_ok = derivative_ok && t.derivative_extremal <= t.derivative_constant;
        info("q=%d: trace extremal %.15f vs %.0f; derivative extremal %.6f vs %.6f", q, t.trace_extremal,
             t.trace_constant, t.derivative_extremal, t.derivative_constant);
    }
    verdict(8, violations == 0 && trace_gap < kTemporalTol && derivative_ok,
            "inverse inequalities hold on 10^4 samples per p <= 4; temporal trace constant attained");
}

void criterion9()
{
    const auto rows = manufactured_convergence({2, 4, 8, 16}, 1, 1, 0.5, 0.1);
    bool pass = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0)
            pass = pass && rows[i].error < rows[i - 1].error && rows[i].eoc >= kEocMin;
        info("p=q=1 %2dx%-2d h %.4f k %.4f error %.4e eoc %.3f", rows[i].n, rows[i].n, rows[i].h, rows[i].k, rows[i].error,
             rows[i].eoc);
    }
    verdict(9, pass, "manufactured solution, p = q = 1: errors decrease with EOC >= 1.5");
    for (const ConvergenceRow& r : manufactured_convergence({2, 4, 8, 16}, 2, 2, 0.5, 0.1))
        info("p=q=2 %2dx%-2d error %.4e eoc %.3f", r.n, r.n, r.error, r.eoc);
}

} // namespace

int main()
{
    const auto start = std::chrono::steady_clock::now();
    std::vector<SweepInstance> failed;
    criterion1();
    criterion2(failed);
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 9 criteria failed (%.0f s)\n", failures, secs);
    return failures;
}
