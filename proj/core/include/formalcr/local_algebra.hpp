#pragma once

// Computations in the local ring C[[x]] at the origin: codimension of ideals
// (with a Nakayama termination certificate), generic rank of series
// matrices, and Krull-dimension tests by generic linear sections.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "formalcr/series.hpp"
#include "formalcr/verdict.hpp"

namespace formalcr {

struct IdealPresentation {
  ContextPtr context;
  std::vector<TruncatedSeries> generators;

  IdealPresentation(ContextPtr ctx, std::vector<TruncatedSeries> gens);

  /// Smallest truncation among inexact generators; nullopt if all are exact.
  std::optional<int> min_inexact_truncation() const;
};

struct CodimensionResult {
  enum class Kind { Finite, NotFiniteUpTo };

  Kind kind = Kind::NotFiniteUpTo;
  std::size_t dimension = 0;          // Finite only
  unsigned certificate_degree = 0;    // Finite only
  unsigned cutoff_used = 0;
  std::vector<Monomial> standard_monomials;  // Finite only, print order

  /// False when the generator list was itself truncated, so `dimension` is
  /// only an upper bound of the true codimension.
  bool value_is_exact = true;

  /// NotFiniteUpTo only: the codimension is provably infinite.
  bool infinite_certified = false;
  std::string infinite_witness;

  bool finite() const { return kind == Kind::Finite; }
};

/// dim_C C[[x]] / I. Requires every inexact generator to have truncation
/// >= cutoff - 1 (PreconditionError otherwise); callers with less precision
/// should lower the cutoff.
CodimensionResult codimension(const IdealPresentation& ideal, unsigned cutoff,
                              unsigned first_degree = 1);

/// Largest cutoff the presentation supports.
unsigned supported_cutoff(const IdealPresentation& ideal, unsigned requested);

struct RankPolicy {
  std::uint64_t seed = 0;
  unsigned trials = 4;
  long height = 7;                 // random evaluation points in [-height, height]
  std::size_t symbolic_bound = 6;  // exhaustive minors for matrices up to this size
};

struct RankResult {
  std::size_t lower_bound = 0;  // certified: rank >= lower_bound
  Verdict full_rank;            // rank == min(rows, cols)?
  std::vector<std::size_t> witness_rows;
  std::vector<std::size_t> witness_cols;
};

RankResult generic_rank(const SeriesMatrix& a, const RankPolicy& policy = {});

/// Rank over evaluations at seeded random points (best over the trials).
/// Only a certified lower bound when all entries are exact.
std::size_t evaluation_rank(const SeriesMatrix& a, const RankPolicy& policy = {});

/// Largest j such that some j x j minor has a nonzero jet.
std::size_t symbolic_rank(const SeriesMatrix& a);

struct DimensionPolicy {
  std::uint64_t seed = 0;
  unsigned trials = 4;
  long height = 7;
  unsigned cutoff = 12;
};

/// Tests Krull dim C[[x]]/I == expected.
Verdict local_dimension_is(const IdealPresentation& ideal, std::size_t expected,
                           const DimensionPolicy& policy = {});

}  // namespace formalcr
