#include "kolmo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kolmo/error.hpp"

namespace kolmo {

bool Element::contains(double x, double y, double tol) const
{
    return x >= x_lo - tol && x <= x_hi + tol && y >= y_lo - tol && y <= y_hi + tol;
}

double Face::length() const
{
    return std::hypot(p1.x - p0.x, p1.y - p0.y);
}

Point side_normal(Side s)
{
    switch (s) {
    case Side::bottom: return {0.0, -1.0};
    case Side::right: return {1.0, 0.0};
    case Side::top: return {0.0, 1.0};
    case Side::left: return {-1.0, 0.0};
    }
    return {0.0, 0.0};
}

Mesh::Mesh(Domain domain, int nx, int ny, std::vector<double> xs, std::vector<double> ys)
    : domain_(domain), nx_(nx), ny_(ny), xs_(std::move(xs)), ys_(std::move(ys))
{
    elements_.reserve(static_cast<std::size_t>(nx * ny));
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            Element el{};
            el.x_lo = xs_[ix];
            el.x_hi = xs_[ix + 1];
            el.y_lo = ys_[iy];
            el.y_hi = ys_[iy + 1];
            el.h = std::hypot(el.width(), el.height());
            el.ix = ix;
            el.iy = iy;
            el.faces.fill(-1);
            elements_.push_back(el);
        }
    }

    auto add_face = [this](Face f) {
        faces_.push_back(f);
        return static_cast<int>(faces_.size()) - 1;
    };

    // Horizontal faces, row by row (including bottom and top boundary).
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            Face f{};
            f.orientation = FaceOrientation::horizontal;
            f.p0 = {xs_[ix], ys_[iy]};
            f.p1 = {xs_[ix + 1], ys_[iy]};
            const int below = iy > 0 ? element_index(ix, iy - 1) : -1;
            const int above = iy < ny ? element_index(ix, iy) : -1;
            if (below >= 0 && above >= 0) {
                f.elements = {above, below};
                f.normal = side_normal(Side::bottom);
            } else if (above >= 0) {
                f.elements = {above, -1};
                f.normal = side_normal(Side::bottom);
            } else {
                f.elements = {below, -1};
                f.normal = side_normal(Side::top);
            }
            const int id = add_face(f);
            if (above >= 0)
                elements_[above].faces[static_cast<int>(Side::bottom)] = id;
            if (below >= 0)
                elements_[below].faces[static_cast<int>(Side::top)] = id;
        }
    }
    // Vertical faces.
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix <= nx; ++ix) {
            Face f{};
            f.orientation = FaceOrientation::vertical;
            f.p0 = {xs_[ix], ys_[iy]};
            f.p1 = {xs_[ix], ys_[iy + 1]};
            const int left = ix > 0 ? element_index(ix - 1, iy) : -1;
            const int right = ix < nx ? element_index(ix, iy) : -1;
            if (left >= 0 && right >= 0) {
                f.elements = {right, left};
                f.normal = side_normal(Side::left);
            } else if (right >= 0) {
                f.elements = {right, -1};
                f.normal = side_normal(Side::left);
            } else {
                f.elements = {left, -1};
                f.normal = side_normal(Side::right);
            }
            const int id = add_face(f);
            if (right >= 0)
                elements_[right].faces[static_cast<int>(Side::left)] = id;
            if (left >= 0)
                elements_[left].faces[static_cast<int>(Side::right)] = id;
        }
    }
}

int Mesh::locate(double x, double y) const
{
    auto find_cell = [](const std::vector<double>& lines, double v) {
        const double tol = 1e-12 * (lines.back() - lines.front());
        if (v < lines.front() - tol || v > lines.back() + tol)
            return -1;
        auto it = std::upper_bound(lines.begin(), lines.end(), v);
        int i = static_cast<int>(it - lines.begin()) - 1;
        return std::clamp(i, 0, static_cast<int>(lines.size()) - 2);
    };
    const int ix = find_cell(xs_, x);
    const int iy = find_cell(ys_, y);
    if (ix < 0 || iy < 0)
        throw DomainError("point (" + std::to_string(x) + ", " + std::to_string(y) + ") outside mesh");
    return element_index(ix, iy);
}

Mesh build_rect_mesh(const Domain& domain, int nx, int ny)
{
    if (nx < 1 || ny < 1)
        throw ConfigError("mesh: nx and ny must be at least 1");
    if (!(domain.x_lo < domain.x_hi) || !(domain.y_lo < domain.y_hi))
        throw ConfigError("mesh: domain must satisfy x_lo < x_hi and y_lo < y_hi");

    std::vector<double> xs(static_cast<std::size_t>(nx) + 1);
    std::vector<double> ys(static_cast<std::size_t>(ny) + 1);
    const double dx = domain.width() / nx;
    const double dy = domain.height() / ny;
    for (int i = 0; i <= nx; ++i)
        xs[i] = domain.x_lo + i * dx;
    for (int j = 0; j <= ny; ++j)
        ys[j] = domain.y_lo + j * dy;
    xs.back() = domain.x_hi;
    ys.back() = domain.y_hi;

    if (domain.straddles_axis()) {
        const double tol = 1e-10 * domain.width();
        auto it = std::find_if(xs.begin(), xs.end(), [tol](double v) { return std::abs(v) <= tol; });
        if (it == xs.end())
            throw ConfigError("mesh: domain straddles x = 0 but no grid line passes through it");
        *it = 0.0;
    }
    return Mesh(domain, nx, ny, std::move(xs), std::move(ys));
}

const char* to_string(FaceTag tag)
{
    switch (tag) {
    case FaceTag::interior: return "interior";
    case FaceTag::gamma0: return "gamma0";
    case FaceTag::gamma_minus: return "gamma_minus";
    case FaceTag::gamma_plus: return "gamma_plus";
    }
    return "?";
}

namespace {

// Sign of x*n2 on the open face; faces never straddle x = 0.
double xn2_sign(const Face& f, const Point& n)
{
    if (n.y == 0.0)
        return 0.0;
    const double xmid = 0.5 * (f.p0.x + f.p1.x);
    const double s = xmid * n.y;
    return s < 0.0 ? -1.0 : (s > 0.0 ? 1.0 : 0.0);
}

} // namespace

FaceClass classify(const Mesh& mesh)
{
    FaceClass fc;
    const int nf = mesh.num_faces();
    const int ne = mesh.num_elements();
    fc.face_tag.resize(static_cast<std::size_t>(nf));
    fc.n1.resize(static_cast<std::size_t>(nf));
    fc.side_tag.resize(static_cast<std::size_t>(ne));
    fc.x_n2.assign(static_cast<std::size_t>(ne), 0.0);
    fc.n1_element.assign(static_cast<std::size_t>(ne), 0.0);

    for (int f = 0; f < nf; ++f) {
        const Face& face = mesh.face(f);
        fc.n1[f] = std::abs(face.normal.x);
        if (!face.is_boundary())
            fc.face_tag[f] = FaceTag::interior;
        else if (face.normal.x != 0.0)
            fc.face_tag[f] = FaceTag::gamma0;
        else
            fc.face_tag[f] = xn2_sign(face, face.normal) < 0.0 ? FaceTag::gamma_minus : FaceTag::gamma_plus;
    }

    for (int e = 0; e < ne; ++e) {
        const Element& el = mesh.element(e);
        for (int s = 0; s < faces_per_element; ++s) {
            const Face& face = mesh.face(el.faces[s]);
            const double sign = xn2_sign(face, side_normal(static_cast<Side>(s)));
            fc.side_tag[e][s] = sign < 0.0 ? SideTag::inflow : SideTag::outflow;
            if (sign < 0.0)
                fc.x_n2[e] = std::max({fc.x_n2[e], std::abs(face.p0.x), std::abs(face.p1.x)});
            fc.n1_element[e] = std::max(fc.n1_element[e], fc.n1[el.faces[s]]);
        }
    }
    return fc;
}

Regularity regularity(const Mesh& mesh)
{
    Regularity r{1.0, 0.0, 0.0};
    double h_min = mesh.element(0).h;
    for (const auto& el : mesh.elements())
        h_min = std::min(h_min, el.h);
    for (const auto& f : mesh.faces()) {
        if (f.is_boundary())
            continue;
        const double h0 = mesh.element(f.elements[0]).h;
        const double h1 = mesh.element(f.elements[1]).h;
        r.c_rho = std::max({r.c_rho, h0 / h1, h1 / h0});
    }
    r.h_min = h_min;
    r.h_bar_min = 0.5 * std::min(1.0, h_min);
    return r;
}

nlohmann::json mesh_to_json(const Mesh& mesh, const FaceClass& fc)
{
    using nlohmann::json;
    json j;
    const Domain& d = mesh.domain();
    j["domain"] = {{"x_lo", d.x_lo}, {"x_hi", d.x_hi}, {"y_lo", d.y_lo}, {"y_hi", d.y_hi}};
    j["nx"] = mesh.nx();
    j["ny"] = mesh.ny();
    json els = json::array();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const Element& el = mesh.element(e);
        els.push_back({{"index", e},
                       {"x_lo", el.x_lo},
                       {"x_hi", el.x_hi},
                       {"y_lo", el.y_lo},
                       {"y_hi", el.y_hi},
                       {"h", el.h}});
    }
    j["elements"] = std::move(els);
    json faces = json::array();
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        json adj = json::array({face.elements[0]});
        if (!face.is_boundary())
            adj.push_back(face.elements[1]);
        faces.push_back({{"index", f},
                         {"p0", {face.p0.x, face.p0.y}},
                         {"p1", {face.p1.x, face.p1.y}},
                         {"normal", {face.normal.x, face.normal.y}},
                         {"elements", adj},
                         {"tag", to_string(fc.face_tag[f])}});
    }
    j["faces"] = std::move(faces);
    return j;
}

} // namespace kolmo
