// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <algorithm>
#include <cmath>
#include <limits>

#include "tracelab/error.hpp"
#include "tracelab/ir.hpp"

namespace tracelab::ir {

const char* to_string(Measure m) {
  switch (m) {
    case Measure::cosine: return "cosine";
    case Measure::jaccard: return "jaccard";
    case Measure::hellinger: return "hellinger";
    case Measure::symmetric_kl: return "symmetric_kl";
  }
  return "cosine";
}

Measure measure_from_string(std::string_view s) {
  if (s == "cosine") return Measure::cosine;
  if (s == "jaccard") return Measure::jaccard;
  if (s == "hellinger") return Measure::hellinger;
  if (s == "symmetric_kl" || s == "kl") return Measure::symmetric_kl;
  throw Error(ErrorCode::invalid_argument,
              "unknown similarity measure '" + std::string(s) + "'");
}

bool is_distribution_measure(Measure m) {
  return m == Measure::hellinger || m == Measure::symmetric_kl;
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double cosine_from(double dot, double nu, double nv) {
  if (nu == 0.0 || nv == 0.0) return 0.0;
  // sqrt(x * x) == x exactly, so identical vectors score exactly 1.
  return clamp01(dot / std::sqrt(nu * nv));
}

double distribution_similarity(std::span<const double> u,
                               std::span<const double> v, Measure measure) {
  double su = 0.0;
  double sv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0.0 || v[i] < 0.0)
      throw Error(ErrorCode::invalid_argument,
                  std::string(to_string(measure)) +
                      " requires non-negative distributions");
    su += u[i];
    sv += v[i];
  }
  if (su <= 0.0 || sv <= 0.0)
    throw Error(ErrorCode::invalid_argument,
                std::string(to_string(measure)) + " requires non-zero mass");

  if (measure == Measure::hellinger) {
    double bc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      bc += std::sqrt((u[i] / su) * (v[i] / sv));
    return clamp01(1.0 - std::sqrt(std::max(0.0, 1.0 - bc)));
  }

  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double p = u[i] / su;
    double q = v[i] / sv;
    if (p == q) continue;
    if (p == 0.0 || q == 0.0) return 0.0;  // divergence is infinite
    d += (p - q) * std::log(p / q);
  }
  return 1.0 / (1.0 + std::max(0.0, d));
}

}  // namespace

double similarity(std::span<const double> u, std::span<const double> v,
                  Measure measure) {
  if (u.size() != v.size())
    throw Error(ErrorCode::invalid_argument,
                "similarity: dimension mismatch (" + std::to_string(u.size()) +
                    " vs " + std::to_string(v.size()) + ")");
  switch (measure) {
    case Measure::cosine: {
      double dot = 0.0, nu = 0.0, nv = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
      }
      return cosine_from(dot, nu, nv);
    }
    case Measure::jaccard: {
      std::size_t inter = 0, uni = 0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        bool a = u[i] != 0.0;
        bool b = v[i] != 0.0;
        inter += (a && b) ? 1 : 0;
        uni += (a || b) ? 1 : 0;
      }
      return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
    case Measure::hellinger:
    case Measure::symmetric_kl:
      return distribution_similarity(u, v, measure);
  }
  return 0.0;
}

double similarity(const SparseVector& u, const SparseVector& v, Measure measure) {
  if (is_distribution_measure(measure))
    throw Error(ErrorCode::incompatible,
                std::string(to_string(measure)) +
                    " is defined on topic distributions, not term vectors");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  std::size_t inter = 0, uni = 0;
  std::size_t i = 0, j = 0;
  while (i < u.size() || j < v.size()) {
    if (j == v.size() || (i < u.size() && u[i].index < v[j].index)) {
      nu += u[i].value * u[i].value;
      uni += u[i].value != 0.0 ? 1 : 0;
      ++i;
    } else if (i == u.size() || v[j].index < u[i].index) {
      nv += v[j].value * v[j].value;
      uni += v[j].value != 0.0 ? 1 : 0;
      ++j;
    } else {
      dot += u[i].value * v[j].value;
      nu += u[i].value * u[i].value;
      nv += v[j].value * v[j].value;
      bool a = u[i].value != 0.0;
      bool b = v[j].value != 0.0;
      inter += (a && b) ? 1 : 0;
      uni += (a || b) ? 1 : 0;
      ++i;
      ++j;
    }
  }
  if (measure == Measure::cosine) return cosine_from(dot, nu, nv);
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace tracelab::ir
