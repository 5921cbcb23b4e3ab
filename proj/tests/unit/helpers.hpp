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

#include "trihybrid/trihybrid.hpp"

#include <gtest/gtest.h>

#include <random>

namespace th_test
{

using namespace trihybrid;

inline CMat random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng, double scale = 1.0)
{
    std::normal_distribution<double> nd(0.0, scale);
    CMat A(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i)
        {
            const double re = nd(rng);
            A(i, j) = cd(re, nd(rng));
        }
    return A;
}

/// Random unitary matrix from the QR factor of a Gaussian matrix.
inline CMat random_unitary(Eigen::Index n, std::mt19937_64 &rng)
{
    Eigen::HouseholderQR<CMat> qr(random_matrix(n, n, rng));
    return qr.householderQ() * CMat::Identity(n, n);
}

/// log2 det(I + A) from the eigenvalues of the Hermitian A.
inline double log2det_eig(const CMat &A)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (A + A.adjoint()));
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        s += std::log2(1.0 + es.eigenvalues()(i));
    return s;
}

inline double max_abs(const CMat &A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

} // namespace th_test

#define EXPECT_ERRC(stmt, errc)                                                                                        \
    do                                                                                                                 \
    {                                                                                                                  \
        try                                                                                                            \
        {                                                                                                              \
            stmt;                                                                                                      \
            ADD_FAILURE() << "expected trihybrid::Error";                                                              \
        }                                                                                                              \
        catch (const trihybrid::Error &e_)                                                                             \
        {                                                                                                              \
            EXPECT_EQ(e_.code(), errc) << e_.what();                                                                   \
        }                                                                                                              \
    } while (0)
