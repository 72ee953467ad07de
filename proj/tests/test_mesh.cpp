#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "kolmo/error.hpp"
#include "kolmo/mesh.hpp"

using namespace kolmo;

namespace {

int count_tag(const FaceClass& fc, FaceTag t)
{
    int n = 0;
    for (FaceTag x : fc.face_tag)
        n += x == t;
    return n;
}

} // namespace

TEST_CASE("unit square 2x2 counts")
{
    const Mesh m = build_rect_mesh({}, 2, 2);
    CHECK(m.num_elements() == 4);
    CHECK(m.num_faces() == 12);
    int interior = 0;
    for (const Face& f : m.faces())
        interior += !f.is_boundary();
    CHECK(interior == 4);
    for (const Face& f : m.faces())
        if (!f.is_boundary())
            CHECK(f.elements[0] > f.elements[1]);
}

TEST_CASE("straddling domain needs a line at x = 0")
{
    const Mesh m = build_rect_mesh({-1.0, 1.0, 0.0, 1.0}, 2, 1);
    CHECK(m.num_elements() == 2);
    CHECK(m.x_lines()[1] == 0.0);
    CHECK_THROWS_AS(build_rect_mesh({-0.7, 1.0, 0.0, 1.0}, 2, 1), ConfigError);
    CHECK_THROWS_AS(build_rect_mesh({}, 0, 1), ConfigError);
}

TEST_CASE("boundary tags on the unit square")
{
    const Mesh m = build_rect_mesh({}, 3, 2);
    const FaceClass fc = classify(m);
    for (int f = 0; f < m.num_faces(); ++f) {
        const Face& face = m.face(f);
        if (!face.is_boundary()) {
            CHECK(fc.face_tag[f] == FaceTag::interior);
            continue;
        }
        if (face.orientation == FaceOrientation::vertical)
            CHECK(fc.face_tag[f] == FaceTag::gamma0);
        else if (face.p0.y == 0.0)
            CHECK(fc.face_tag[f] == FaceTag::gamma_minus);
        else
            CHECK(fc.face_tag[f] == FaceTag::gamma_plus);
    }
    CHECK(count_tag(fc, FaceTag::gamma0) == 4);
    CHECK(count_tag(fc, FaceTag::gamma_minus) == 3);
    CHECK(count_tag(fc, FaceTag::gamma_plus) == 3);
}

TEST_CASE("boundary tags on a domain straddling x = 0")
{
    const Mesh m = build_rect_mesh({-1.0, 1.0, 0.0, 1.0}, 2, 1);
    const FaceClass fc = classify(m);
    for (int f = 0; f < m.num_faces(); ++f) {
        const Face& face = m.face(f);
        if (!face.is_boundary() || face.orientation != FaceOrientation::horizontal)
            continue;
        const bool left = face.p0.x + face.p1.x < 0.0;
        const bool bottom = face.p0.y == 0.0;
        const FaceTag expect = (left == bottom) ? FaceTag::gamma_plus : FaceTag::gamma_minus;
        CHECK(fc.face_tag[f] == expect);
    }
}

TEST_CASE("inflow and outflow sides partition each element boundary")
{
    const Mesh m = build_rect_mesh({-2.0, 1.0, 0.5, 2.0}, 6, 3);
    const FaceClass fc = classify(m);
    for (int e = 0; e < m.num_elements(); ++e) {
        const Element& el = m.element(e);
        double in = 0.0, out = 0.0;
        for (int s = 0; s < faces_per_element; ++s) {
            const double len = m.face(el.faces[s]).length();
            (fc.side_tag[e][s] == SideTag::inflow ? in : out) += len;
            const Point n = side_normal(static_cast<Side>(s));
            const double xn2 = el.center().x * n.y;
            CHECK((fc.side_tag[e][s] == SideTag::inflow) == (xn2 < 0.0));
        }
        CHECK(in + out == doctest::Approx(2.0 * (el.width() + el.height())));
    }
}

TEST_CASE("boundary face lengths sum to the side lengths")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::uniform_int_distribution<int> ni(1, 7);
    for (int trial = 0; trial < 50; ++trial) {
        const double x0 = u(rng), y0 = u(rng) - 1.5;
        const Domain d{x0, x0 + u(rng), y0, y0 + u(rng)};
        const Mesh m = build_rect_mesh(d, ni(rng), ni(rng));
        const FaceClass fc = classify(m);
        std::map<FaceTag, double> len;
        for (int f = 0; f < m.num_faces(); ++f)
            len[fc.face_tag[f]] += m.face(f).length();
        CHECK(len[FaceTag::gamma0] == doctest::Approx(2.0 * d.height()));
        CHECK(len[FaceTag::gamma_minus] == doctest::Approx(d.width()));
        CHECK(len[FaceTag::gamma_plus] == doctest::Approx(d.width()));
    }
}

TEST_CASE("classification is deterministic")
{
    const Mesh m = build_rect_mesh({-1.0, 1.0, 0.0, 2.0}, 4, 3);
    const FaceClass a = classify(m), b = classify(m);
    CHECK(a.face_tag == b.face_tag);
    CHECK(a.n1 == b.n1);
    CHECK(a.x_n2 == b.x_n2);
}

TEST_CASE("n1 and x n2 caches")
{
    const Mesh m = build_rect_mesh({}, 2, 2);
    const FaceClass fc = classify(m);
    for (int f = 0; f < m.num_faces(); ++f)
        CHECK(fc.n1[f] == (m.face(f).orientation == FaceOrientation::vertical ? 1.0 : 0.0));
    // inflow boundary of each cell is its bottom side; max |x| there is x_hi
    for (int e = 0; e < m.num_elements(); ++e)
        CHECK(fc.x_n2[e] == doctest::Approx(m.element(e).x_hi));
}

TEST_CASE("regularity")
{
    const Regularity r4 = regularity(build_rect_mesh({}, 4, 4));
    CHECK(r4.c_rho == 1.0);
    CHECK(r4.h_min == doctest::Approx(std::sqrt(2.0) / 4.0));
    CHECK(r4.h_bar_min == doctest::Approx(r4.h_min / 2.0));
    const Regularity r1 = regularity(build_rect_mesh({}, 1, 1));
    CHECK(r1.h_min == doctest::Approx(std::sqrt(2.0)));
    CHECK(r1.h_bar_min == doctest::Approx(0.5));
    CHECK(regularity(build_rect_mesh({0.0, 3.0, 0.0, 1.0}, 5, 2)).c_rho >= 1.0);
}

TEST_CASE("mesh json export")
{
    const Mesh m = build_rect_mesh({}, 2, 1);
    const nlohmann::json j = mesh_to_json(m, classify(m));
    CHECK(j["elements"].size() == 2);
    CHECK(j["faces"].size() == 7);
}
