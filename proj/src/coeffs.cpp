#include "kolmo/coeffs.hpp"

#include <algorithm>
#include <cmath>

#include "kolmo/error.hpp"

namespace kolmo {

namespace {

void require_positive_degree(int p, const char* what)
{
    if (p < 1)
        throw ConfigError(std::string(what) + ": requires polynomial degree p >= 1");
}

double pow4(double v) { return v * v * v * v; }

} // namespace

double sigma_face(double n1, double h_a, double h_b, int p, const InverseConstants& c)
{
    const double s = c.c_trace * n1 * p;
    return 64.0 * faces_per_element * s * s * std::max(1.0 / h_a, 1.0 / h_b);
}

double tau_semi(double h, int p, double sigma_t, double x_n2, const InverseConstants& c)
{
    require_positive_degree(p, "tau");
    const double p2 = static_cast<double>(p) * p;
    const double p4 = p2 * p2;
    const double xc = 8.0 * x_n2 * c.c_trace;
    const double denom = 65.0 * c.c_grad * c.c_grad / 6.0 + 3.0 * sigma_t * sigma_t * h * h / (64.0 * p4) +
                         xc * xc * h / (3.0 * p2);
    return h * h / p4 / denom;
}

double tau_full(double tau_t, double k, int q)
{
    if (!(k > 0.0))
        throw ConfigError("tau: time step must be positive");
    const double qq = q + 1.0;
    return std::min(tau_t, k / (64.0 * qq * qq));
}

namespace {

double delta_from_r(const DeltaInputs& in, double r, const InverseConstants& c)
{
    const double p2 = static_cast<double>(in.p) * in.p;
    const double ct2 = c.c_trace * c.c_trace;
    const double inner = std::max({4.0 + c.c_grad * c.c_grad / (8.0 * ct2), in.x_n2 * in.x_n2 * in.h / p2, std::sqrt(r)});
    return std::max(1.0, ct2 * p2 * p2 / (in.h * in.h) * inner);
}

double r_semi(const DeltaInputs& in, const InverseConstants& c)
{
    const double p2 = static_cast<double>(in.p) * in.p;
    const double t1 = 2.0 * in.h * in.h / (p2 * p2) / in.tau;
    const double n = in.n1 * in.c_rho / c.c_trace;
    const double t2 = 1040.0 * faces_per_element * n * n;
    const double g = c.c_grad / c.c_trace * in.x_n2;
    const double t3 = 8.0 * g * g / p2 * in.h;
    return t1 + t2 + t3;
}

} // namespace

double delta_semi(const DeltaInputs& in, const InverseConstants& c)
{
    require_positive_degree(in.p, "delta");
    return delta_from_r(in, r_semi(in, c), c);
}

double delta_full(const DeltaInputs& in, double k, int q, const InverseConstants& c)
{
    require_positive_degree(in.p, "delta");
    if (!(k > 0.0))
        throw ConfigError("delta: time step must be positive");
    const double qq = q + 1.0;
    const double extra = 2.0 * in.h * in.h * qq * qq / pow4(in.p) / k;
    return delta_from_r(in, r_semi(in, c) + extra, c);
}

AMatrix abc_from_delta(double delta)
{
    if (!(delta >= 1.0))
        throw ConfigError("A: delta must be >= 1");
    return {1.0 / (8.0 * delta), 1.0 / (48.0 * delta * delta), 10.0 / (48.0 * 48.0 * delta * delta * delta)};
}

SpectralBounds2x2 spectral_bounds(double a, double b, double c)
{
    const double det = a * c - b * b;
    const double tol = 1e-14 * std::max({1.0, a * a, c * c});
    if (a < 0.0 || c < 0.0 || c > a || det < -tol)
        throw DomainError("spectral_bounds: need a >= c >= 0 and ac - b^2 >= 0");
    const double upper = a + std::abs(b);
    const double lower = upper > 0.0 ? std::max(det, 0.0) / upper : 0.0;
    return {a, b, c, lower, upper};
}

namespace {

CoeffSet make_penalty(const Mesh& mesh, const FaceClass& fc, int p, const InverseConstants& c)
{
    CoeffSet cs;
    cs.p = p;
    cs.constants = c;
    cs.c_rho = regularity(mesh).c_rho;
    const int nf = mesh.num_faces();
    const int ne = mesh.num_elements();
    cs.sigma_face.assign(static_cast<std::size_t>(nf), 0.0);
    cs.sigma.assign(static_cast<std::size_t>(ne), 0.0);
    for (int f = 0; f < nf; ++f) {
        const Face& face = mesh.face(f);
        if (face.is_boundary())
            continue;
        cs.sigma_face[f] = sigma_face(fc.n1[f], mesh.element(face.elements[0]).h, mesh.element(face.elements[1]).h, p, c);
        for (int e : face.elements)
            cs.sigma[e] = std::max(cs.sigma[e], cs.sigma_face[f]);
    }
    return cs;
}

CoeffSet make_common(const Mesh& mesh, const FaceClass& fc, int p, const InverseConstants& c)
{
    require_positive_degree(p, "coefficients");
    CoeffSet cs = make_penalty(mesh, fc, p, c);
    const int ne = mesh.num_elements();
    cs.tau.resize(static_cast<std::size_t>(ne));
    cs.delta.resize(static_cast<std::size_t>(ne));
    cs.a.resize(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e)
        cs.tau[e] = tau_semi(mesh.element(e).h, p, cs.sigma[e], fc.x_n2[e], c);
    return cs;
}

} // namespace

CoeffSet make_penalty_coeffs(const Mesh& mesh, const FaceClass& fc, int p, const InverseConstants& c)
{
    if (p < 0)
        throw ConfigError("coefficients: polynomial degree must be non-negative");
    return make_penalty(mesh, fc, p, c);
}

CoeffSet make_semi_coeffs(const Mesh& mesh, const FaceClass& fc, int p, const InverseConstants& c)
{
    CoeffSet cs = make_common(mesh, fc, p, c);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const DeltaInputs in{mesh.element(e).h, p, cs.tau[e], fc.x_n2[e], fc.n1_element[e], cs.c_rho};
        cs.delta[e] = delta_semi(in, c);
        cs.a[e] = abc_from_delta(cs.delta[e]);
    }
    return cs;
}

CoeffSet make_full_coeffs(const Mesh& mesh, const FaceClass& fc, int p, int q, double k, const InverseConstants& c)
{
    CoeffSet cs = make_common(mesh, fc, p, c);
    cs.q = q;
    cs.k = k;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        cs.tau[e] = tau_full(cs.tau[e], k, q);
        const DeltaInputs in{mesh.element(e).h, p, cs.tau[e], fc.x_n2[e], fc.n1_element[e], cs.c_rho};
        cs.delta[e] = delta_full(in, k, q, c);
        cs.a[e] = abc_from_delta(cs.delta[e]);
    }
    return cs;
}

} // namespace kolmo
