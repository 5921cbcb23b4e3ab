// SPDX-License-Identifier: Apache-2.0
//
// trihybrid: simulation library for tri-hybrid MIMO transmit architectures
// Copyright (C) 2026 The trihybrid authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace trihybrid
{

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cd J{0.0, 1.0};

/// Ceiling on the condition estimate accepted by checked inverses.
inline constexpr double max_condition = 1e12;

inline std::string dims(const CMat &A)
{
    return std::to_string(A.rows()) + "x" + std::to_string(A.cols());
}

inline void require_finite(const CMat &A, std::string_view module, const char *what)
{
    if (!A.allFinite())
        detail::fail(Errc::non_finite, module, std::string(what) + " has non-finite entries");
}

inline void require_product(const CMat &A, const CMat &B, std::string_view module, const char *what)
{
    if (A.cols() != B.rows())
        detail::fail(Errc::dimension_mismatch, module,
                     std::string(what) + ": cannot multiply " + dims(A) + " by " + dims(B));
}

/// Squared Frobenius norm.
inline double frob2(const CMat &A) { return A.squaredNorm(); }

/// Hermitian part (A + A^H)/2.
inline CMat hermitian_part(const CMat &A) { return 0.5 * (A + A.adjoint()); }

/// Entrywise real part, kept complex-typed.
inline CMat real_part(const CMat &A) { return A.real().cast<cd>(); }

/// Inverse via partial-pivot LU; refuses matrices whose 1-norm condition
/// estimate exceeds max_condition.
inline CMat checked_inverse(const CMat &A, std::string_view module, Errc code = Errc::singular_configuration)
{
    if (A.rows() != A.cols())
        detail::fail(Errc::dimension_mismatch, module, "inverse of non-square " + dims(A));
    require_finite(A, module, "matrix to invert");
    if (A.rows() == 0)
        return A;
    Eigen::PartialPivLU<CMat> lu(A);
    const double rc = lu.rcond();
    if (!(rc > 1.0 / max_condition))
        detail::fail(code, module, "matrix is singular to working precision (rcond " + std::to_string(rc) + ")");
    return lu.inverse();
}

/// Moore-Penrose pseudo-inverse through the SVD.
inline CMat pinv(const CMat &A, double rel_tol = 1e-12)
{
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    const double cut = s.size() ? rel_tol * s(0) : 0.0;
    RVec inv = RVec::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut)
            inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.cast<cd>().asDiagonal() * svd.matrixU().adjoint();
}

/// Numerical rank with a relative singular value threshold.
inline Eigen::Index numerical_rank(const CMat &A, double rel_tol = 1e-10)
{
    if (A.size() == 0)
        return 0;
    Eigen::JacobiSVD<CMat> svd(A);
    const auto &s = svd.singularValues();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0))
            ++r;
    return r;
}

/// Block-diagonal stacking of column vectors.
inline CMat blkdiag_columns(const std::vector<CVec> &cols)
{
    Eigen::Index rows = 0;
    for (const auto &c : cols)
        rows += c.size();
    CMat out = CMat::Zero(rows, static_cast<Eigen::Index>(cols.size()));
    Eigen::Index r0 = 0;
    for (std::size_t p = 0; p < cols.size(); ++p)
    {
        out.block(r0, static_cast<Eigen::Index>(p), cols[p].size(), 1) = cols[p];
        r0 += cols[p].size();
    }
    return out;
}

/// Block-diagonal stacking of two square or rectangular blocks.
inline CMat blkdiag(const CMat &A, const CMat &B)
{
    CMat out = CMat::Zero(A.rows() + B.rows(), A.cols() + B.cols());
    out.topLeftCorner(A.rows(), A.cols()) = A;
    out.bottomRightCorner(B.rows(), B.cols()) = B;
    return out;
}

/// Real trace of F^H M F, with M replaced by its Hermitian part.
inline double hermitian_form_trace(const CMat &F, const CMat &M)
{
    return (F.adjoint() * hermitian_part(M) * F).trace().real();
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace trihybrid
