#pragma once

#include <vector>

#include "brs/sets.hpp"

namespace brs {

// Compiled numeric form of a set for fast evaluation of chi_S on the torus.
// Building it inverts the parallelepiped frames once; evaluation enumerates
// only the integer translates that can reach the point.
class Indicator {
 public:
  Indicator(const SetDescription& s, const AlphaContext& ctx);

  int dim() const { return d_; }
  // chi_S(x); x is reduced mod 1 first.
  int count(const double* x) const;
  int count(const std::vector<double>& x) const { return count(x.data()); }
  // True if some translate of x lies within eps of the boundary of S.
  bool near_boundary(const double* x, double eps) const;

  struct Interval1 {
    double a, b;
  };
  struct Frame {
    std::vector<double> base;
    std::vector<double> w;       // rows of the inverse generator matrix, row-major
    std::vector<double> rownorm;
    std::vector<std::vector<long>> head;  // candidate k_1..k_{d-1}
    std::vector<double> whead;            // W * head, row-major per candidate
    long klo = 0, khi = 0;               // bbox range of k_d
    // Optional rational region in coordinates (j, k), as inequalities
    // a*t_j + b*t_k <= c.
    int j = -1, k = -1;
    std::vector<double> ra, rb, rc;
  };
  struct Poly {
    std::vector<double> xs, ys;
    double lo[2], hi[2];
    std::vector<std::vector<long>> shifts;
  };
  struct Halfspaces {
    std::vector<double> n;  // row-major normals
    std::vector<double> c;  // n.x <= c
    std::vector<std::vector<long>> shifts;
  };

 private:
  void add(const SetDescription& s, const AlphaContext& ctx);
  void add_frame(const std::vector<double>& base, const std::vector<std::vector<double>>& gens,
                 const FramedPolygon* region);
  int frame_count(const Frame& f, const double* x, double slack, double* nearest) const;

  int d_ = 0;
  std::vector<Interval1> intervals_;
  std::vector<Frame> frames_;
  std::vector<Poly> polys_;
  std::vector<Halfspaces> hulls_;
};

}  // namespace brs
