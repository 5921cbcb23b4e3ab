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

#include "core.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace trihybrid::pixel
{

/// Per-feed excitation dictionaries. Column n of D[p] is the unit-norm
/// excitation of state n on subpanel p; eta[p][n] is its efficiency.
struct StateDictionary
{
    std::vector<CMat> D;
    std::vector<std::vector<std::size_t>> admissible;
    std::vector<std::vector<double>> eta;

    std::size_t num_feeds() const { return D.size(); }
    Eigen::Index num_states(std::size_t p) const { return D[p].cols(); }

    Eigen::Index total_rows() const
    {
        Eigen::Index r = 0;
        for (const auto &d : D)
            r += d.rows();
        return r;
    }

    void validate() const
    {
        const std::string_view m = "pixel";
        detail::require(!D.empty(), Errc::invalid_argument, m, "dictionary has no feeds");
        detail::require(admissible.size() == D.size() && eta.size() == D.size(), Errc::dimension_mismatch, m,
                        "admissible sets and efficiencies must be given per feed");
        for (std::size_t p = 0; p < D.size(); ++p)
        {
            detail::require(D[p].cols() > 0 && D[p].rows() > 0, Errc::invalid_argument, m, "empty subpanel dictionary");
            detail::require(Eigen::Index(eta[p].size()) == D[p].cols(), Errc::dimension_mismatch, m,
                            "efficiency table size differs from state count");
            detail::require(!admissible[p].empty(), Errc::invalid_argument, m, "admissible set is empty");
            for (auto n : admissible[p])
                detail::require(Eigen::Index(n) < D[p].cols(), Errc::invalid_argument, m, "admissible index out of range");
            for (double e : eta[p])
                detail::require(e > 0.0 && e <= 1.0, Errc::invalid_argument, m, "efficiency outside (0, 1]");
            for (Eigen::Index n = 0; n < D[p].cols(); ++n)
                detail::require(std::abs(D[p].col(n).norm() - 1.0) < 1e-10, Errc::invalid_argument, m,
                                "dictionary column is not unit norm");
        }
    }

    /// Dictionary from 0/1 activation patterns; each column is normalized.
    static StateDictionary from_binary(const std::vector<std::vector<std::vector<int>>> &patterns,
                                       const std::vector<std::vector<double>> &eta = {})
    {
        StateDictionary d;
        for (std::size_t p = 0; p < patterns.size(); ++p)
        {
            const auto &pp = patterns[p];
            detail::require(!pp.empty(), Errc::invalid_argument, "pixel", "feed has no patterns");
            const auto rows = Eigen::Index(pp[0].size());
            CMat Dp = CMat::Zero(rows, Eigen::Index(pp.size()));
            for (std::size_t n = 0; n < pp.size(); ++n)
            {
                detail::require(Eigen::Index(pp[n].size()) == rows, Errc::dimension_mismatch, "pixel",
                                "patterns differ in length");
                double cnt = 0.0;
                for (int b : pp[n])
                {
                    detail::require(b == 0 || b == 1, Errc::invalid_argument, "pixel", "pattern entries must be 0 or 1");
                    cnt += b;
                }
                detail::require(cnt > 0.0, Errc::invalid_argument, "pixel", "pattern activates no pixel");
                for (Eigen::Index r = 0; r < rows; ++r)
                    Dp(r, Eigen::Index(n)) = double(pp[n][std::size_t(r)]) / std::sqrt(cnt);
            }
            d.D.push_back(std::move(Dp));
        }
        d.fill_defaults(eta);
        return d;
    }

    /// Dictionary from complex excitations; each column is normalized.
    static StateDictionary from_complex(std::vector<CMat> D, const std::vector<std::vector<double>> &eta = {})
    {
        StateDictionary d;
        for (auto &Dp : D)
            for (Eigen::Index n = 0; n < Dp.cols(); ++n)
            {
                const double nrm = Dp.col(n).norm();
                detail::require(nrm > 0.0, Errc::invalid_argument, "pixel", "zero excitation column");
                Dp.col(n) /= nrm;
            }
        d.D = std::move(D);
        d.fill_defaults(eta);
        return d;
    }

    /// Tabular text: feed, state, element, re, im, eta per line; '#' starts a
    /// comment, commas or whitespace separate fields, a non-numeric first line
    /// is a header. eta is taken from the last row of each (feed, state).
    static StateDictionary load(std::istream &in)
    {
        std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, cd>> entries;
        std::map<std::pair<std::size_t, std::size_t>, double> etas;
        std::string line;
        std::size_t lineno = 0;
        bool first = true;
        while (std::getline(in, line))
        {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos)
                line.erase(h);
            for (auto &c : line)
                if (c == ',' || c == ';' || c == '\t')
                    c = ' ';
            std::istringstream ss(line);
            std::vector<std::string> tok;
            for (std::string t; ss >> t;)
                tok.push_back(t);
            if (tok.empty())
                continue;
            double vals[6];
            bool numeric = tok.size() == 6;
            for (std::size_t i = 0; numeric && i < 6; ++i)
            {
                try
                {
                    std::size_t used = 0;
                    vals[i] = std::stod(tok[i], &used);
                    numeric = used == tok[i].size();
                }
                catch (const std::exception &)
                {
                    numeric = false;
                }
            }
            if (!numeric)
            {
                if (first)
                {
                    first = false;
                    continue;
                }
                detail::fail(Errc::parse, "pixel", "dictionary line " + std::to_string(lineno) +
                                                       ": expected 6 numeric fields (feed state element re im eta)");
            }
            first = false;
            for (int i = 0; i < 3; ++i)
                if (vals[i] < 0 || vals[i] != std::floor(vals[i]))
                    detail::fail(Errc::parse, "pixel",
                                 "dictionary line " + std::to_string(lineno) + ": indices must be integers >= 0");
            const auto key = std::make_pair(std::size_t(vals[0]), std::size_t(vals[1]));
            entries[key][std::size_t(vals[2])] = cd(vals[3], vals[4]);
            etas[key] = vals[5];
        }
        detail::require(!entries.empty(), Errc::parse, "pixel", "dictionary file has no entries");

        std::size_t n_feeds = entries.rbegin()->first.first + 1;
        std::vector<CMat> D(n_feeds);
        std::vector<std::vector<double>> eta(n_feeds);
        for (std::size_t p = 0; p < n_feeds; ++p)
        {
            std::size_t n_states = 0, n_elem = 0;
            for (const auto &[key, col] : entries)
                if (key.first == p)
                {
                    n_states = std::max(n_states, key.second + 1);
                    n_elem = std::max(n_elem, col.rbegin()->first + 1);
                }
            detail::require(n_states > 0, Errc::parse, "pixel", "feed " + std::to_string(p) + " has no states");
            D[p] = CMat::Zero(Eigen::Index(n_elem), Eigen::Index(n_states));
            eta[p].assign(n_states, 1.0);
            for (std::size_t n = 0; n < n_states; ++n)
            {
                auto it = entries.find({p, n});
                detail::require(it != entries.end(), Errc::parse, "pixel",
                                "feed " + std::to_string(p) + " is missing state " + std::to_string(n));
                for (const auto &[e, v] : it->second)
                    D[p](Eigen::Index(e), Eigen::Index(n)) = v;
                eta[p][n] = etas[{p, n}];
            }
        }
        auto d = from_complex(std::move(D), eta);
        d.validate();
        return d;
    }

    static StateDictionary load_file(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            detail::fail(Errc::parse, "pixel", "cannot open dictionary file " + path);
        return load(f);
    }

private:
    void fill_defaults(const std::vector<std::vector<double>> &eta_in)
    {
        admissible.clear();
        eta.clear();
        for (std::size_t p = 0; p < D.size(); ++p)
        {
            std::vector<std::size_t> all(std::size_t(D[p].cols()));
            for (std::size_t n = 0; n < all.size(); ++n)
                all[n] = n;
            admissible.push_back(std::move(all));
            if (p < eta_in.size())
                eta.push_back(eta_in[p]);
            else
                eta.emplace_back(std::size_t(D[p].cols()), 1.0);
        }
    }
};

/// Selected state index per feed.
struct SelectionState
{
    std::vector<std::size_t> n;

    bool operator==(const SelectionState &) const = default;
};

/// Block-diagonal one-hot selection matrix, (N_p N_sub) x N_p.
inline RMat selection_matrix(const SelectionState &s, std::size_t n_sub)
{
    const auto np = Eigen::Index(s.n.size());
    RMat S = RMat::Zero(np * Eigen::Index(n_sub), np);
    for (Eigen::Index p = 0; p < np; ++p)
    {
        if (s.n[std::size_t(p)] >= n_sub)
            detail::fail(Errc::invalid_argument, "pixel", "state index " + std::to_string(s.n[std::size_t(p)]) +
                                                              " out of range for " + std::to_string(n_sub) + " states");
        S(p * Eigen::Index(n_sub) + Eigen::Index(s.n[std::size_t(p)]), p) = 1.0;
    }
    return S;
}

inline void check_state(const StateDictionary &dict, const SelectionState &s)
{
    if (s.n.size() != dict.num_feeds())
        detail::fail(Errc::dimension_mismatch, "pixel", "state has " + std::to_string(s.n.size()) + " feeds, dictionary " +
                                                            std::to_string(dict.num_feeds()));
    for (std::size_t p = 0; p < s.n.size(); ++p)
        if (Eigen::Index(s.n[p]) >= dict.num_states(p))
            detail::fail(Errc::invalid_argument, "pixel", "state index out of range on feed " + std::to_string(p));
}

/// F_ra = D_ra S_ra: column p is d_{p, n_p} placed on subpanel p's rows.
inline CMat fra_from_selection(const StateDictionary &dict, const SelectionState &s)
{
    check_state(dict, s);
    std::vector<CVec> cols;
    for (std::size_t p = 0; p < s.n.size(); ++p)
        cols.push_back(dict.D[p].col(Eigen::Index(s.n[p])));
    return blkdiag_columns(cols);
}

inline CMat effective_channel(const CMat &H, const CMat &F_ra)
{
    require_product(H, F_ra, "pixel", "H * F_ra");
    return H * F_ra;
}

/// Per feed, the admissible state closest in Euclidean distance; ties go to
/// the smallest index.
inline SelectionState nearest_state(const StateDictionary &dict, const CMat &F_ra)
{
    if (F_ra.cols() != Eigen::Index(dict.num_feeds()) || F_ra.rows() != dict.total_rows())
        detail::fail(Errc::dimension_mismatch, "pixel", "F_ra is " + dims(F_ra));
    SelectionState s;
    Eigen::Index r0 = 0;
    for (std::size_t p = 0; p < dict.num_feeds(); ++p)
    {
        const auto rows = dict.D[p].rows();
        const CVec col = F_ra.col(Eigen::Index(p)).segment(r0, rows);
        std::vector<std::size_t> order = dict.admissible[p];
        std::sort(order.begin(), order.end());
        std::size_t best = order.front();
        double best_d = std::numeric_limits<double>::infinity();
        for (auto n : order)
        {
            const double d = (col - dict.D[p].col(Eigen::Index(n))).squaredNorm();
            if (d < best_d)
            {
                best_d = d;
                best = n;
            }
        }
        s.n.push_back(best);
        r0 += rows;
    }
    return s;
}

enum class PowerMode
{
    exact,
    simplified
};

/// Radiated power with state-dependent efficiency. Exact mode weights the
/// hybrid output of feed p by the efficiency of its selected state; the
/// simplified mode uses the mean selected efficiency as a common factor.
inline double radiated_power(const StateDictionary &dict, const CMat &F_ra, const CMat &F_ana, const CMat &F_dig,
                             PowerMode mode = PowerMode::exact)
{
    require_product(F_ana, F_dig, "pixel", "F_ana * F_dig");
    const CMat F = F_ana * F_dig;
    if (F.rows() != Eigen::Index(dict.num_feeds()))
        detail::fail(Errc::dimension_mismatch, "pixel", "hybrid precoder must have one row per feed");
    const auto s = nearest_state(dict, F_ra);
    RVec eta(Eigen::Index(dict.num_feeds()));
    for (std::size_t p = 0; p < dict.num_feeds(); ++p)
    {
        const double e = dict.eta[p][s.n[p]];
        if (!(e > 0.0 && e <= 1.0))
            detail::fail(Errc::invalid_argument, "pixel", "efficiency outside (0, 1]");
        eta(Eigen::Index(p)) = e;
    }
    if (mode == PowerMode::simplified)
        return eta.mean() * frob2(F);
    return (F.adjoint() * eta.cast<cd>().asDiagonal() * F).trace().real();
}

/// Pixel front end: propagation channel per subcarrier and a dictionary.
class FrontEndModel
{
public:
    using config_type = SelectionState;

    FrontEndModel(ChannelTensor H, StateDictionary dict, PowerMode mode = PowerMode::exact)
        : H_(std::move(H)), dict_(std::move(dict)), mode_(mode)
    {
        H_.validate("pixel");
        dict_.validate();
        detail::require(H_[0].cols() == dict_.total_rows(), Errc::dimension_mismatch, "pixel",
                        "channel columns differ from dictionary element count");
    }

    std::size_t num_subcarriers() const { return H_.size(); }
    const StateDictionary &dictionary() const { return dict_; }
    CMat propagation_channel(std::size_t k) const { return H_[k]; }

    bool is_feasible(const config_type &s) const
    {
        if (s.n.size() != dict_.num_feeds())
            return false;
        for (std::size_t p = 0; p < s.n.size(); ++p)
            if (std::find(dict_.admissible[p].begin(), dict_.admissible[p].end(), s.n[p]) == dict_.admissible[p].end())
                return false;
        return true;
    }

    CMat ra_precoder(const config_type &s, std::size_t) const { return fra_from_selection(dict_, s); }
    CMat effective_channel(const config_type &s, std::size_t k) const { return H_[k] * ra_precoder(s, k); }

    double radiated_power(const config_type &s, std::size_t k, const CMat &F_ana, const CMat &F_dig) const
    {
        return pixel::radiated_power(dict_, ra_precoder(s, k), F_ana, F_dig, mode_);
    }

    /// States differing from s in exactly one feed.
    std::vector<config_type> neighbors(const config_type &s) const
    {
        std::vector<config_type> out;
        for (std::size_t p = 0; p < s.n.size(); ++p)
            for (auto n : dict_.admissible[p])
                if (n != s.n[p])
                {
                    auto t = s;
                    t.n[p] = n;
                    out.push_back(std::move(t));
                }
        return out;
    }

private:
    ChannelTensor H_;
    StateDictionary dict_;
    PowerMode mode_;
};

} // namespace trihybrid::pixel
