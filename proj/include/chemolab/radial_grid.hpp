#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace chemo {

/// A sampled radial function: one value per grid node.
using Field = std::vector<double>;

/// Surface area of the unit sphere in R^N, |dB_1| = 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_area(int dim);

enum class GridLayout { Uniform, Geometric };

/// Truncated radial mesh on [0, r_max] for dimension N >= 3.
///
/// Nodes are strictly increasing with r_0 = 0 and r_M = r_max. Quadrature
/// weights absorb the radial measure r^{N-1}: sum_i w_i f(r_i) approximates
/// |dB_1| * int_0^{r_max} f(r) r^{N-1} dr. The rule is the midpoint-cell
/// (finite-volume) rule: each node carries the exact mass of its cell between
/// the neighboring face radii. It is exact on constants (the weights sum to
/// the ball volume exactly), second-order accurate for smooth fields, and
/// shares its cell volumes with the conservative flux operators so discrete
/// mass accounting telescopes exactly.
///
/// Grids are immutable after construction and safe to share across threads.
class RadialGrid {
public:
    static RadialGrid uniform(double r_max, int cells, int dim);
    /// Geometric layout clusters nodes near r = 0: spacings shrink toward the
    /// origin by the given ratio in (0,1),
    ///   r_i = r_max * (ratio^{M-i} - ratio^M) / (1 - ratio^M).
    static RadialGrid geometric(double r_max, int cells, int dim, double ratio);
    /// Solve for the geometric ratio that yields the requested first cell
    /// width r_1 - r_0, then build the grid.
    static RadialGrid geometric_first_cell(double r_max, int cells, int dim,
                                           double first_cell);

    std::span<const double> nodes() const { return nodes_; }
    /// Quadrature weights including the |dB_1| factor.
    std::span<const double> quad_weights() const { return quad_weights_; }
    /// Cell masses V_i = int_{r_{i-1/2}}^{r_{i+1/2}} r^{N-1} dr (no |dB_1|),
    /// the dual volumes of the conservative flux operators.
    std::span<const double> cell_volumes() const { return cell_volumes_; }

    int dim() const { return dim_; }
    double r_max() const { return r_max_; }
    double sphere_area() const { return sphere_area_; }
    std::size_t size() const { return nodes_.size(); }   // M + 1 nodes
    std::size_t cells() const { return nodes_.size() - 1; }

    double node(std::size_t i) const { return nodes_[i]; }
    double spacing(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; } // i in [0, M)
    double min_spacing() const { return min_spacing_; }
    /// Face radius r_{i+1/2} between nodes i and i+1.
    double face(std::size_t i) const { return 0.5 * (nodes_[i] + nodes_[i + 1]); }
    /// Face area factor r_{i+1/2}^{N-1}.
    double face_area(std::size_t i) const { return face_areas_[i]; }

    GridLayout layout() const { return layout_; }
    double ratio() const { return ratio_; }

private:
    RadialGrid(std::vector<double> nodes, int dim, GridLayout layout, double ratio);

    std::vector<double> nodes_;
    std::vector<double> quad_weights_;
    std::vector<double> cell_volumes_;
    std::vector<double> face_areas_;
    int dim_ = 3;
    double r_max_ = 0.0;
    double sphere_area_ = 0.0;
    double min_spacing_ = 0.0;
    GridLayout layout_ = GridLayout::Uniform;
    double ratio_ = 1.0;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Spec-level entry point: layout selected by enum, ratio ignored for uniform.
RadialGrid build_grid(double r_max, int cells, GridLayout layout, int dim,
                      double ratio = 0.5);

/// |dB_1(N)| * int_0^{r_max} f(r) r^{N-1} dr by the grid's quadrature rule.
/// Throws EvaluationError naming the first non-finite node.
double integrate_radial(std::span<const double> f, const RadialGrid& grid);

/// p-norm against the radial measure; p = infinity gives max_i |f_i|.
inline constexpr double p_inf = std::numeric_limits<double>::infinity();
double lp_norm(std::span<const double> f, double p, const RadialGrid& grid);

double sup_norm(std::span<const double> f);
double min_value(std::span<const double> f);

} // namespace chemo
