#pragma once

#include <string>
#include <vector>

#include "sgdlab/descent.hpp"
#include "sgdlab/fokker_planck.hpp"
#include "sgdlab/moments.hpp"
#include "sgdlab/montecarlo.hpp"

namespace sgdlab {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// CSV writers.  Columns are fixed so identical inputs serialize
// byte-identically.
std::string trajectory_csv(const TrajectoryRecord& rec);            // m,w_0..,f,grad_sq,alpha
std::string moments_csv(const MomentSeries& series);                // m,E,F,V
std::string histogram_csv(const Histogram& h);                      // bin_left,bin_right,count
                                                                    // (2-d: x/y bounds,count)
std::string density_trail_csv(const std::vector<DensityState>& states);  // t,x,rho
std::string grad_sq_curve_csv(const std::vector<GradSqPoint>& curve);    // m,mean,std_error

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace sgdlab
