#include "kolmo/assembly.hpp"

#include <array>
#include <cmath>

#include "kolmo/error.hpp"

namespace kolmo {

namespace {

struct QuadPoint
{
    double x, y, w;
};

std::vector<QuadPoint> cell_points(const Element& el, const QuadRule& rule)
{
    std::vector<QuadPoint> pts;
    pts.reserve(rule.size() * rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i)
        for (std::size_t j = 0; j < rule.size(); ++j)
            pts.push_back({el.x_lo + 0.5 * el.width() * (rule.points[i] + 1.0),
                           el.y_lo + 0.5 * el.height() * (rule.points[j] + 1.0),
                           0.25 * el.area() * rule.weights[i] * rule.weights[j]});
    return pts;
}

std::vector<QuadPoint> face_points(const Face& f, const QuadRule& rule)
{
    std::vector<QuadPoint> pts;
    const double len = f.length();
    for (std::size_t g = 0; g < rule.size(); ++g) {
        const double s = 0.5 * (rule.points[g] + 1.0);
        pts.push_back({f.p0.x + s * (f.p1.x - f.p0.x), f.p0.y + s * (f.p1.y - f.p0.y), 0.5 * len * rule.weights[g]});
    }
    return pts;
}

// Scatters a local block (rows: test modes of element `re`, cols: trial modes of `ce`).
void scatter(Triplets& t, const DgSpace& space, int re, int ce, const Eigen::MatrixXd& block)
{
    for (Eigen::Index i = 0; i < block.rows(); ++i)
        for (Eigen::Index j = 0; j < block.cols(); ++j)
            if (block(i, j) != 0.0)
                t.emplace_back(space.dof(re, static_cast<int>(i)), space.dof(ce, static_cast<int>(j)), block(i, j));
}

SpMat build(const DgSpace& space, Triplets& t)
{
    SpMat m(space.num_dofs(), space.num_dofs());
    m.setFromTriplets(t.begin(), t.end());
    m.prune(0.0);
    return m;
}

void check_adjacency(const Mesh& mesh, int f)
{
    const Face& face = mesh.face(f);
    const int ne = mesh.num_elements();
    if (face.elements[0] < 0 || face.elements[0] >= ne || face.elements[1] >= ne)
        throw AssemblyError("face " + std::to_string(f) + " has no valid adjacency");
}

// Element that sees the face as inflow (x n2 < 0), or -1 when neither does.
int downstream_slot(const Face& face)
{
    if (face.orientation != FaceOrientation::horizontal)
        return -1;
    const double s = 0.5 * (face.p0.x + face.p1.x) * face.normal.y;
    if (s < 0.0)
        return 0;
    if (s > 0.0)
        return 1;
    return -1;
}

SpMat block_diagonal(const DgSpace& space, const std::vector<double>& per_element)
{
    Triplets t;
    for (int e = 0; e < space.mesh().num_elements(); ++e)
        for (int m = 0; m < space.local_dim(); ++m)
            t.emplace_back(space.dof(e, m), space.dof(e, m), per_element[static_cast<std::size_t>(e)]);
    return build(space, t);
}

} // namespace

SpMat DgFormParts::sum() const
{
    return diffusion + advection + consistency + penalty + upwind_int + upwind_bdry;
}

DgFormParts assemble_adg_parts(const Mesh& mesh, const FaceClass& fc, const DgSpace& space,
                               std::span<const double> sigma_face)
{
    if (static_cast<int>(sigma_face.size()) != mesh.num_faces())
        throw AssemblyError("adg: penalty array does not match the face count");
    const int n = space.local_dim();
    const QuadRule rule = gauss_legendre(space.degree() + 2);
    Triplets diff, adv, cons, pen, upi, upb;
    BasisEval b, b0, b1;

    for (int e = 0; e < mesh.num_elements(); ++e) {
        Eigen::MatrixXd kd = Eigen::MatrixXd::Zero(n, n), ka = Eigen::MatrixXd::Zero(n, n);
        for (const QuadPoint& q : cell_points(mesh.element(e), rule)) {
            space.evaluate(e, q.x, q.y, b);
            kd += q.w * b.dx * b.dx.transpose();
            ka += q.w * q.x * b.value * b.dy.transpose();
        }
        scatter(diff, space, e, e, kd);
        scatter(adv, space, e, e, ka);
    }

    for (int f = 0; f < mesh.num_faces(); ++f) {
        check_adjacency(mesh, f);
        const Face& face = mesh.face(f);
        const auto pts = face_points(face, rule);
        if (face.is_boundary()) {
            if (fc.face_tag[f] != FaceTag::gamma_minus)
                continue;
            const int e = face.elements[0];
            Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
            for (const QuadPoint& q : pts) {
                space.evaluate(e, q.x, q.y, b);
                k += q.w * std::abs(q.x * face.normal.y) * b.value * b.value.transpose();
            }
            scatter(upb, space, e, e, k);
            continue;
        }

        const std::array<int, 2> el = face.elements;
        const std::array<double, 2> sgn = {1.0, -1.0};
        const double n1 = face.normal.x;
        const double sigma = sigma_face[static_cast<std::size_t>(f)];
        const int d = downstream_slot(face);
        std::array<std::array<Eigen::MatrixXd, 2>, 2> kc, kp, ku;
        for (auto* blocks : {&kc, &kp, &ku})
            for (auto& row : *blocks)
                for (auto& m : row)
                    m = Eigen::MatrixXd::Zero(n, n);

        for (const QuadPoint& q : pts) {
            space.evaluate(el[0], q.x, q.y, b0);
            space.evaluate(el[1], q.x, q.y, b1);
            const std::array<const BasisEval*, 2> be = {&b0, &b1};
            for (int rb = 0; rb < 2; ++rb) {      // test side
                for (int ca = 0; ca < 2; ++ca) {  // trial side
                    const BasisEval& v = *be[rb];
                    const BasisEval& u = *be[ca];
                    if (n1 != 0.0) {
                        kc[rb][ca] -= q.w * 0.5 * n1 * sgn[rb] * v.value * u.dx.transpose();
                        kc[rb][ca] -= q.w * 0.5 * n1 * sgn[ca] * v.dx * u.value.transpose();
                    }
                    if (sigma != 0.0)
                        kp[rb][ca] += q.w * sigma * sgn[rb] * sgn[ca] * v.value * u.value.transpose();
                }
            }
            if (d >= 0) {
                const int up = 1 - d;
                const double wx = q.w * std::abs(q.x);
                ku[d][d] += wx * be[d]->value * be[d]->value.transpose();
                ku[d][up] -= wx * be[d]->value * be[up]->value.transpose();
            }
        }
        for (int rb = 0; rb < 2; ++rb) {
            for (int ca = 0; ca < 2; ++ca) {
                scatter(cons, space, el[rb], el[ca], kc[rb][ca]);
                scatter(pen, space, el[rb], el[ca], kp[rb][ca]);
                scatter(upi, space, el[rb], el[ca], ku[rb][ca]);
            }
        }
    }
    return {build(space, diff), build(space, adv), build(space, cons), build(space, pen), build(space, upi),
            build(space, upb)};
}

SpMat assemble_adg(const Mesh& mesh, const FaceClass& fc, const DgSpace& space, const CoeffSet& coeffs)
{
    return assemble_adg_parts(mesh, fc, space, coeffs.sigma_face).sum();
}

SpMat assemble_uw_gram(const Mesh& mesh, const FaceClass& fc, const DgSpace& space)
{
    const int n = space.local_dim();
    const QuadRule rule = gauss_legendre(space.degree() + 2);
    Triplets t;
    BasisEval b0, b1;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (face.orientation != FaceOrientation::horizontal)
            continue;
        const auto pts = face_points(face, rule);
        if (face.is_boundary()) {
            const FaceTag tag = fc.face_tag[static_cast<std::size_t>(f)];
            if (tag != FaceTag::gamma_minus && tag != FaceTag::gamma_plus)
                continue;
            const int e = face.elements[0];
            Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
            for (const QuadPoint& q : pts) {
                space.evaluate(e, q.x, q.y, b0);
                k += q.w * std::abs(q.x * face.normal.y) * b0.value * b0.value.transpose();
            }
            scatter(t, space, e, e, k);
            continue;
        }
        // Squared upwind jump: the orientation of the difference does not matter.
        const std::array<int, 2> el = face.elements;
        const std::array<double, 2> sgn = {1.0, -1.0};
        std::array<std::array<Eigen::MatrixXd, 2>, 2> k;
        for (auto& row : k)
            for (auto& m : row)
                m = Eigen::MatrixXd::Zero(n, n);
        for (const QuadPoint& q : pts) {
            space.evaluate(el[0], q.x, q.y, b0);
            space.evaluate(el[1], q.x, q.y, b1);
            const std::array<const BasisEval*, 2> be = {&b0, &b1};
            for (int rb = 0; rb < 2; ++rb)
                for (int ca = 0; ca < 2; ++ca)
                    k[rb][ca] += q.w * std::abs(q.x) * sgn[rb] * sgn[ca] * be[rb]->value * be[ca]->value.transpose();
        }
        for (int rb = 0; rb < 2; ++rb)
            for (int ca = 0; ca < 2; ++ca)
                scatter(t, space, el[rb], el[ca], k[rb][ca]);
    }
    return build(space, t);
}

SpMat FormSet::gram_enh_static() const
{
    const SpMat tk = tau * transport;
    return gram_enh0 + 0.5 * SpMat(transport.transpose() * tk);
}

SpMat FormSet::test_map_semi() const
{
    return mass + SpMat(tau * transport) + div_a;
}

FormSet assemble_forms(const Mesh& mesh, const FaceClass& fc, const DgSpace& space, const CoeffSet& coeffs)
{
    const int ne = mesh.num_elements();
    if (static_cast<int>(coeffs.a.size()) != ne || static_cast<int>(coeffs.tau.size()) != ne)
        throw AssemblyError("forms: coefficient set lacks tau or A");
    const int n = space.local_dim();
    const QuadRule rule = gauss_legendre(space.degree() + 2);

    const DgFormParts parts = assemble_adg_parts(mesh, fc, space, coeffs.sigma_face);
    FormSet fs;
    fs.adg = parts.sum();
    fs.gram_jump = parts.penalty;
    fs.transport = parts.advection;
    fs.gram_dx = parts.diffusion;

    Triplets dy, grad_a, hess_a, alpha_dy, div_a, grad, outflow;
    BasisEval b, b0, b1;
    for (int e = 0; e < ne; ++e) {
        const AMatrix& a = coeffs.a[static_cast<std::size_t>(e)];
        Eigen::MatrixXd kdy = Eigen::MatrixXd::Zero(n, n), kga = kdy, kha = kdy, kdiv = kdy;
        for (const QuadPoint& q : cell_points(mesh.element(e), rule)) {
            space.evaluate(e, q.x, q.y, b);
            kdy += q.w * b.dy * b.dy.transpose();
            kga += q.w * (a.alpha * b.dx * b.dx.transpose() + a.beta * (b.dx * b.dy.transpose() + b.dy * b.dx.transpose()) +
                          a.gamma * b.dy * b.dy.transpose());
            kha += q.w * (a.alpha * b.dxx * b.dxx.transpose() +
                          a.beta * (b.dxx * b.dxy.transpose() + b.dxy * b.dxx.transpose()) +
                          a.gamma * b.dxy * b.dxy.transpose());
            const Eigen::VectorXd l = a.alpha * b.dxx + 2.0 * a.beta * b.dxy + a.gamma * b.dyy;
            kdiv -= q.w * b.value * l.transpose();
        }
        scatter(dy, space, e, e, kdy);
        scatter(grad_a, space, e, e, kga);
        scatter(hess_a, space, e, e, kha);
        scatter(alpha_dy, space, e, e, 0.5 * a.alpha * a.alpha * kdy);
        scatter(div_a, space, e, e, kdiv);

        // Outflow boundary of T: horizontal sides with x n2 > 0 (vertical sides carry x n2 = 0).
        const Element& el = mesh.element(e);
        for (Side s : {Side::bottom, Side::top}) {
            const int si = static_cast<int>(s);
            if (fc.side_tag[static_cast<std::size_t>(e)][si] != SideTag::outflow)
                continue;
            const double n2 = side_normal(s).y;
            Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
            for (const QuadPoint& q : face_points(mesh.face(el.faces[si]), rule)) {
                space.evaluate(e, q.x, q.y, b);
                const double w = q.w * q.x * n2;
                k += w * (a.alpha * b.dx * b.dx.transpose() + a.beta * (b.dx * b.dy.transpose() + b.dy * b.dx.transpose()) +
                          a.gamma * b.dy * b.dy.transpose());
            }
            scatter(outflow, space, e, e, k);
        }
    }

    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        const auto pts = face_points(face, rule);
        if (face.is_boundary()) {
            const FaceTag tag = fc.face_tag[static_cast<std::size_t>(f)];
            if (tag == FaceTag::gamma0)
                continue;
            const int e = face.elements[0];
            Eigen::MatrixXd kp = Eigen::MatrixXd::Zero(n, n);
            for (const QuadPoint& q : pts) {
                space.evaluate(e, q.x, q.y, b);
                kp += q.w / mesh.element(e).h * b.value * b.value.transpose();
            }
            scatter(grad, space, e, e, kp);
            continue;
        }
        const std::array<int, 2> el = face.elements;
        const std::array<double, 2> sgn = {1.0, -1.0};
        const double h_avg = 0.5 * (mesh.element(el[0]).h + mesh.element(el[1]).h);
        std::array<std::array<Eigen::MatrixXd, 2>, 2> kj;
        for (auto& row : kj)
            for (auto& m : row)
                m = Eigen::MatrixXd::Zero(n, n);
        for (const QuadPoint& q : pts) {
            space.evaluate(el[0], q.x, q.y, b0);
            space.evaluate(el[1], q.x, q.y, b1);
            const std::array<const BasisEval*, 2> be = {&b0, &b1};
            for (int rb = 0; rb < 2; ++rb)
                for (int ca = 0; ca < 2; ++ca)
                    kj[rb][ca] += q.w / h_avg * sgn[rb] * sgn[ca] * be[rb]->value * be[ca]->value.transpose();
        }
        for (int rb = 0; rb < 2; ++rb)
            for (int ca = 0; ca < 2; ++ca)
                scatter(grad, space, el[rb], el[ca], kj[rb][ca]);
    }

    fs.mass = block_diagonal(space, std::vector<double>(static_cast<std::size_t>(ne), 1.0));
    fs.gram_dy = build(space, dy);
    fs.grad_a = build(space, grad_a);
    fs.gram_ah = fs.mass + fs.grad_a;
    fs.gram_uw = assemble_uw_gram(mesh, fc, space);
    fs.gram_dg = fs.gram_dx + 0.5 * fs.gram_uw + fs.gram_jump;
    fs.gram_hess_a = build(space, hess_a);
    fs.gram_outflow = build(space, outflow);
    fs.gram_enh0 = fs.gram_hess_a + build(space, alpha_dy) + 0.5 * fs.gram_dx + fs.gram_outflow + fs.gram_jump +
                   2.0 * fs.gram_uw;
    fs.div_a = build(space, div_a);
    fs.tau = block_diagonal(space, coeffs.tau);
    fs.poincare = fs.gram_dx + fs.gram_dy + build(space, grad);
    return fs;
}

TemporalForms temporal_forms(const TemporalBasis& basis)
{
    return {basis.derivative_matrix(), basis.start_trace(), basis.end_trace()};
}

SlabSystem assemble_slab_matrix(const SpMat& adg, const TemporalForms& tf)
{
    const int nt = static_cast<int>(tf.start.size());
    const int ns = static_cast<int>(adg.rows());
    SpMat eye(ns, ns);
    eye.setIdentity();
    const Eigen::MatrixXd time = tf.deriv + tf.start * tf.start.transpose();
    SlabSystem s;
    s.matrix = kron(time, eye) + block_identity_kron(nt, adg);
    s.coupling = kron(Eigen::MatrixXd(tf.start), eye);
    return s;
}

SpMat assemble_test_map(const FormSet& forms, const TemporalForms& tf)
{
    const int nt = static_cast<int>(tf.start.size());
    return block_identity_kron(nt, forms.test_map_semi()) + kron(tf.deriv, forms.tau);
}

Eigen::VectorXd assemble_slab_load(const DgSpace& space, const TemporalBasis& basis, const SpaceTimeFunction& f,
                                   int extra)
{
    const Mesh& mesh = space.mesh();
    const int ns = space.num_dofs();
    const int n = space.local_dim();
    const QuadRule rs = gauss_legendre(space.degree() + 2 + extra);
    const QuadRule rt = gauss_legendre(basis.degree() + 2 + extra);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dim()) * ns);
    BasisEval b;
    std::vector<Eigen::VectorXd> psi;
    std::vector<double> tq, wq;
    for (std::size_t g = 0; g < rt.size(); ++g) {
        tq.push_back(basis.t0() + 0.5 * basis.length() * (rt.points[g] + 1.0));
        wq.push_back(0.5 * basis.length() * rt.weights[g]);
        psi.push_back(basis.values(tq.back()));
    }
    for (int e = 0; e < mesh.num_elements(); ++e) {
        for (const QuadPoint& q : cell_points(mesh.element(e), rs)) {
            space.evaluate(e, q.x, q.y, b);
            for (std::size_t g = 0; g < tq.size(); ++g) {
                const double fv = f(q.x, q.y, tq[g]) * q.w * wq[g];
                if (fv == 0.0)
                    continue;
                for (int a = 0; a < basis.dim(); ++a)
                    load.segment(static_cast<Eigen::Index>(a) * ns + space.dof(e, 0), n) += fv * psi[g][a] * b.value;
            }
        }
    }
    return load;
}

SpMat start_trace_operator(const TemporalForms& tf, int ns)
{
    SpMat eye(ns, ns);
    eye.setIdentity();
    return kron(Eigen::MatrixXd(tf.start.transpose()), eye);
}

SpMat end_trace_operator(const TemporalForms& tf, int ns)
{
    SpMat eye(ns, ns);
    eye.setIdentity();
    return kron(Eigen::MatrixXd(tf.end.transpose()), eye);
}

SpMat slab_enhanced_gram(const FormSet& forms, const TemporalForms& tf)
{
    const int nt = static_cast<int>(tf.start.size());
    const SpMat w = kron(tf.deriv, forms.mass) + block_identity_kron(nt, forms.transport);
    const SpMat tw = block_identity_kron(nt, forms.tau) * w;
    return block_identity_kron(nt, forms.gram_enh0) + 0.5 * SpMat(w.transpose() * tw);
}

} // namespace kolmo
