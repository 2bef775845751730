// Copyright 2026 The sdkick Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "sdkick/integrator.hpp"

namespace sdkick {

namespace detail {

/// psi(t) = V(t)^{-1} exp(-i M t) e_0 with V = diag(exp(i chi_j t)). M is real symmetric,
/// so exp(-i M t) is assembled from its eigendecomposition.
template <int N>
std::array<cplx, N> gauge_solve(const Eigen::Matrix<double, N, N>& m, const std::array<double, N>& chi, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(m);
    const auto& vecs = es.eigenvectors();
    const auto& vals = es.eigenvalues();
    std::array<cplx, N> out{};
    for (int j = 0; j < N; ++j) {
        cplx b{};
        for (int k = 0; k < N; ++k) b += vecs(j, k) * std::polar(1.0, -vals(k) * t) * vecs(0, k);
        out[j] = b * std::polar(1.0, -chi[j] * t);
    }
    return out;
}

}  // namespace detail

/// Constant-envelope kick from |0,0> in the three-state manifold {|0,0>, |1,+2i eta>, |1,-2i eta>}.
/// g0 = Omega_0 / 2. Returns (c0, c1+, c1-).
inline std::array<cplx, 3> gauge_solver_3(double g0, double omega_a, double dw, double t) {
    const double wm = omega_a - dw;
    const double wp = omega_a + dw;
    Eigen::Matrix3d m;
    m << 0, g0, g0,  //
        g0, wm, 0,   //
        g0, 0, wp;
    return detail::gauge_solve<3>(m, {0.0, -wm, -wp}, t);
}

/// Five-state manifold adding |0,+4i eta> and |0,-4i eta>. Returns (c0, c1+, c1-, c2+, c2-).
inline std::array<cplx, 5> gauge_solver_5(double g0, double omega_a, double dw, double t) {
    const double wm = omega_a - dw;
    const double wp = omega_a + dw;
    Eigen::Matrix<double, 5, 5> m;
    m << 0, g0, g0, 0, 0,       //
        g0, wm, 0, g0, 0,       //
        g0, 0, wp, 0, g0,       //
        0, g0, 0, -2.0 * dw, 0,  //
        0, 0, g0, 0, 2.0 * dw;
    return detail::gauge_solve<5>(m, {0.0, -wm, -wp, 2.0 * dw, -2.0 * dw}, t);
}

}  // namespace sdkick
