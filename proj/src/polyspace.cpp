#include "kolmo/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "kolmo/error.hpp"

namespace kolmo {

LegendreValue legendre(int n, double s)
{
    // Three-term recurrences for P_n, P_n', P_n''.
    double p0 = 1.0, p1 = s;
    double d0 = 0.0, d1 = 1.0;
    double e0 = 0.0, e1 = 0.0;
    if (n == 0)
        return {1.0, 0.0, 0.0};
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * s * p1 - k * p0) / (k + 1.0);
        const double d2 = d0 + (2.0 * k + 1.0) * p1;
        const double e2 = e0 + (2.0 * k + 1.0) * d1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        e0 = e1;
        e1 = e2;
    }
    return {p1, d1, e1};
}

QuadRule gauss_legendre(int npoints)
{
    if (npoints < 1)
        throw ConfigError("quadrature: need at least one point");
    QuadRule rule;
    rule.points.resize(static_cast<std::size_t>(npoints));
    rule.weights.resize(static_cast<std::size_t>(npoints));
    rule.exactness = 2 * npoints - 1;
    const int n = npoints;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto lv = legendre(n, x);
            const double dx = lv.value / lv.d1;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double d = legendre(n, x).d1;
        const double w = 2.0 / ((1.0 - x * x) * d * d);
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.points[n / 2] = 0.0;
    return rule;
}

QuadratureSet make_quadrature(int p, int q)
{
    if (p < 0 || q < 0)
        throw ConfigError("quadrature: degrees must be non-negative");
    return {gauss_legendre(p + 2), gauss_legendre(q + 2)};
}

DgSpace::DgSpace(const Mesh& mesh, int p) : mesh_(&mesh), p_(p)
{
    if (p < 0)
        throw ConfigError("space: polynomial degree must be non-negative");
    for (int d = 0; d <= p; ++d)
        for (int j = 0; j <= d; ++j)
            modes_.push_back({d - j, j});
    nloc_ = static_cast<int>(modes_.size());
}

void DgSpace::evaluate(int e, double x, double y, BasisEval& out) const
{
    const Element& el = mesh_->element(e);
    const double hx = el.width(), hy = el.height();
    const double xi = (2.0 * x - (el.x_lo + el.x_hi)) / hx;
    const double eta = (2.0 * y - (el.y_lo + el.y_hi)) / hy;
    const double sx = 2.0 / hx, sy = 2.0 / hy;

    std::vector<LegendreValue> lx(static_cast<std::size_t>(p_) + 1), ly(static_cast<std::size_t>(p_) + 1);
    for (int k = 0; k <= p_; ++k) {
        lx[k] = legendre(k, xi);
        ly[k] = legendre(k, eta);
    }
    out.value.resize(nloc_);
    out.dx.resize(nloc_);
    out.dy.resize(nloc_);
    out.dxx.resize(nloc_);
    out.dxy.resize(nloc_);
    out.dyy.resize(nloc_);
    const double area = hx * hy;
    for (int m = 0; m < nloc_; ++m) {
        const auto [i, j] = modes_[m];
        const double c = std::sqrt((2.0 * i + 1.0) * (2.0 * j + 1.0) / area);
        const auto& a = lx[i];
        const auto& b = ly[j];
        out.value[m] = c * a.value * b.value;
        out.dx[m] = c * sx * a.d1 * b.value;
        out.dy[m] = c * sy * a.value * b.d1;
        out.dxx[m] = c * sx * sx * a.d2 * b.value;
        out.dxy[m] = c * sx * sy * a.d1 * b.d1;
        out.dyy[m] = c * sy * sy * a.value * b.d2;
    }
}

BasisEval DgSpace::evaluate(int e, double x, double y) const
{
    BasisEval out;
    evaluate(e, x, y, out);
    return out;
}

double DgSpace::value(const Eigen::VectorXd& u, int e, double x, double y) const
{
    const BasisEval b = evaluate(e, x, y);
    return b.value.dot(u.segment(dof(e, 0), nloc_));
}

TemporalBasis::TemporalBasis(int q, double t0, double t1) : q_(q), t0_(t0), t1_(t1)
{
    if (q < 0)
        throw ConfigError("time basis: degree must be non-negative");
    if (!(t1 > t0))
        throw ConfigError("time basis: interval must have positive length");
}

double TemporalBasis::value(int a, double t) const
{
    const double k = length();
    const double s = 2.0 * (t - t0_) / k - 1.0;
    return std::sqrt((2.0 * a + 1.0) / k) * legendre(a, s).value;
}

double TemporalBasis::derivative(int a, double t) const
{
    const double k = length();
    const double s = 2.0 * (t - t0_) / k - 1.0;
    return std::sqrt((2.0 * a + 1.0) / k) * (2.0 / k) * legendre(a, s).d1;
}

Eigen::VectorXd TemporalBasis::values(double t) const
{
    Eigen::VectorXd v(dim());
    for (int a = 0; a <= q_; ++a)
        v[a] = value(a, t);
    return v;
}

Eigen::MatrixXd TemporalBasis::derivative_matrix() const
{
    const QuadRule rule = gauss_legendre(q_ + 1);
    const double k = length();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim(), dim());
    for (std::size_t g = 0; g < rule.size(); ++g) {
        const double t = t0_ + 0.5 * k * (rule.points[g] + 1.0);
        const double w = 0.5 * k * rule.weights[g];
        for (int a = 0; a <= q_; ++a) {
            const double da = derivative(a, t);
            for (int b = 0; b <= q_; ++b)
                d(b, a) += w * da * value(b, t);
        }
    }
    return d;
}

SlabSpace::SlabSpace(const DgSpace& space, int q, double t0, double t1)
    : space_(&space), time_(q, t0, t1)
{
}

Eigen::VectorXd SlabSpace::at(const Eigen::VectorXd& u, double t) const
{
    if (t < time_.t0() - 1e-12 * time_.length() || t > time_.t1() + 1e-12 * time_.length())
        throw DomainError("slab: time outside [t0, t1]");
    const int ns = num_spatial();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ns);
    for (int a = 0; a <= q(); ++a)
        out += time_.value(a, t) * u.segment(a * ns, ns);
    return out;
}

namespace {

struct ShapeForms
{
    Eigen::MatrixXd trace, stiffness;
    double h;
};

// Trace and stiffness Gram matrices of the orthonormal basis on a single
// width-by-1 cell.
ShapeForms shape_forms(int p, double aspect)
{
    const Mesh cell = build_rect_mesh({0.0, aspect, 0.0, 1.0}, 1, 1);
    const DgSpace space(cell, p);
    const int n = space.local_dim();
    const QuadRule rule = gauss_legendre(p + 2);
    const Element& el = cell.element(0);
    ShapeForms f{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), el.h};
    BasisEval b;
    for (std::size_t gx = 0; gx < rule.size(); ++gx) {
        for (std::size_t gy = 0; gy < rule.size(); ++gy) {
            const double x = el.x_lo + 0.5 * el.width() * (rule.points[gx] + 1.0);
            const double y = el.y_lo + 0.5 * el.height() * (rule.points[gy] + 1.0);
            const double w = 0.25 * el.area() * rule.weights[gx] * rule.weights[gy];
            space.evaluate(0, x, y, b);
            f.stiffness += w * (b.dx * b.dx.transpose() + b.dy * b.dy.transpose());
        }
    }
    for (const Face& face : cell.faces()) {
        const double len = face.length();
        for (std::size_t g = 0; g < rule.size(); ++g) {
            const double s = 0.5 * (rule.points[g] + 1.0);
            const double x = face.p0.x + s * (face.p1.x - face.p0.x);
            const double y = face.p0.y + s * (face.p1.y - face.p0.y);
            space.evaluate(0, x, y, b);
            f.trace += 0.5 * len * rule.weights[g] * b.value * b.value.transpose();
        }
    }
    return f;
}

double largest_eigenvalue(const Eigen::MatrixXd& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("inverse constants: eigensolver did not converge");
    return es.eigenvalues().maxCoeff();
}

} // namespace

InverseConstants compute_inverse_constants(int p, std::span<const double> aspect_ratios)
{
    if (p < 0)
        throw ConfigError("inverse constants: degree must be non-negative");
    if (aspect_ratios.empty())
        throw ConfigError("inverse constants: no cell shapes given");
    InverseConstants c{p, 0.0, 0.0};
    const double pt = std::max(p, 1);
    for (double aspect : aspect_ratios) {
        const ShapeForms f = shape_forms(p, aspect);
        c.c_trace = std::max(c.c_trace, std::sqrt(largest_eigenvalue(f.trace) * f.h / (pt * pt)));
        if (p > 0)
            c.c_grad = std::max(c.c_grad, std::sqrt(largest_eigenvalue(f.stiffness) * f.h * f.h / std::pow(p, 4)));
    }
    return c;
}

InverseConstants compute_inverse_constants(int p)
{
    const double square = 1.0;
    return compute_inverse_constants(p, std::span<const double>(&square, 1));
}

InverseConstants inverse_constants_for(const Mesh& mesh, int p)
{
    std::set<double> shapes;
    for (const auto& el : mesh.elements()) {
        // Shapes are compared up to rounding noise from the grid coordinates.
        const double r = el.width() / el.height();
        shapes.insert(std::round(r * 1e9) / 1e9);
    }
    const std::vector<double> v(shapes.begin(), shapes.end());
    return compute_inverse_constants(p, v);
}

double temporal_derivative_constant(int q)
{
    return std::sqrt(12.0) * (q + 1.0) * (q + 1.0);
}

} // namespace kolmo
