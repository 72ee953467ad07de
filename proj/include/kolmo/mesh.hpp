#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kolmo {

struct Domain
{
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;

    double width() const { return x_hi - x_lo; }
    double height() const { return y_hi - y_lo; }
    bool straddles_axis() const { return x_lo < 0.0 && x_hi > 0.0; }
};

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

/// Local side numbering of a rectangle.
enum class Side : int { bottom = 0, right = 1, top = 2, left = 3 };

inline constexpr int faces_per_element = 4;

struct Element
{
    double x_lo, x_hi, y_lo, y_hi;
    double h;       // diameter (cell diagonal)
    int ix, iy;     // position in the tensor grid
    std::array<int, faces_per_element> faces; // indexed by Side

    double width() const { return x_hi - x_lo; }
    double height() const { return y_hi - y_lo; }
    double area() const { return width() * height(); }
    Point center() const { return {0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi)}; }
    bool contains(double x, double y, double tol = 1e-12) const;
};

enum class FaceOrientation { vertical, horizontal };

/**
 * A mesh face. For interior faces `elements[0]` holds the higher element
 * index and `elements[1]` the lower one, so that the jump [w] = w|elements[0]
 * - w|elements[1]. `normal` is the unit outward normal of `elements[0]`.
 * Boundary faces have `elements[1] == -1`.
 */
struct Face
{
    Point p0, p1;
    FaceOrientation orientation;
    Point normal;
    std::array<int, 2> elements;

    bool is_boundary() const { return elements[1] < 0; }
    double length() const;
    /// Fixed coordinate of the face line (x for vertical, y for horizontal).
    double line_coord() const { return orientation == FaceOrientation::vertical ? p0.x : p0.y; }
    /// Running coordinate range along the face.
    double lo() const { return orientation == FaceOrientation::vertical ? p0.y : p0.x; }
    double hi() const { return orientation == FaceOrientation::vertical ? p1.y : p1.x; }
};

class Mesh
{
public:
    Mesh(Domain domain, int nx, int ny, std::vector<double> xs, std::vector<double> ys);

    const Domain& domain() const { return domain_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const std::vector<Element>& elements() const { return elements_; }
    const std::vector<Face>& faces() const { return faces_; }
    const Element& element(int e) const { return elements_[static_cast<std::size_t>(e)]; }
    const Face& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int element_index(int ix, int iy) const { return iy * nx_ + ix; }
    /// Element containing (x, y); points on shared edges resolve to the lower index.
    int locate(double x, double y) const;

    const std::vector<double>& x_lines() const { return xs_; }
    const std::vector<double>& y_lines() const { return ys_; }

private:
    Domain domain_;
    int nx_, ny_;
    std::vector<double> xs_, ys_;
    std::vector<Element> elements_;
    std::vector<Face> faces_;
};

/// Uniform nx-by-ny tensor grid. Throws ConfigError when the domain straddles
/// x = 0 and no grid line falls on it.
Mesh build_rect_mesh(const Domain& domain, int nx, int ny);

enum class FaceTag { interior, gamma0, gamma_minus, gamma_plus };
enum class SideTag { inflow, outflow };

const char* to_string(FaceTag tag);

struct FaceClass
{
    std::vector<FaceTag> face_tag;
    /// side_tag[e][s] for element e and local Side s.
    std::vector<std::array<SideTag, faces_per_element>> side_tag;
    /// ||n_1||_{L_inf(F)} per face.
    std::vector<double> n1;
    /// ||x n_2||_{L_inf(inflow boundary of T)} per element.
    std::vector<double> x_n2;
    /// max over faces of T of n1^F.
    std::vector<double> n1_element;
};

FaceClass classify(const Mesh& mesh);

/// Outward normal of element e on local side s.
Point side_normal(Side s);

struct Regularity
{
    double c_rho;
    double h_min;
    double h_bar_min; // half of min{1, h_min}
};

Regularity regularity(const Mesh& mesh);

nlohmann::json mesh_to_json(const Mesh& mesh, const FaceClass& fc);

} // namespace kolmo
