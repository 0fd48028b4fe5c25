#include "ulearn/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include <omp.h>

namespace ulearn {

namespace {

const Vocabulary& binary_vocabulary() {
  static const Vocabulary v({{"R", 2}});
  return v;
}

std::uint32_t permuted_code(std::uint32_t code, std::uint32_t n, const std::vector<std::uint32_t>& perm) {
  std::uint32_t out = 0;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (code >> (i * n + j) & 1u) out |= 1u << (perm[i] * n + perm[j]);
  return out;
}

}  // namespace

std::vector<Snapshot> binary_relation_classes(std::uint32_t max_size) {
  if (max_size > 4) throw std::invalid_argument("binary_relation_classes: max_size above 4");
  std::vector<Snapshot> out;
  for (std::uint32_t n = 1; n <= max_size; ++n) {
    std::vector<std::vector<std::uint32_t>> perms;
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    const std::uint32_t total = 1u << (n * n);
    for (std::uint32_t code = 0; code < total; ++code) {
      bool canonical = true;
      for (const auto& q : perms)
        if (permuted_code(code, n, q) < code) {
          canonical = false;
          break;
        }
      if (!canonical) continue;
      std::vector<Tuple> r;
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j)
          if (code >> (i * n + j) & 1u) r.push_back({i, j});
      out.emplace_back(binary_vocabulary(), n, std::vector<std::vector<Tuple>>{std::move(r)});
    }
  }
  return out;
}

namespace {

// Relation pattern of a tuple of distinct elements: bit i*L+j for R(t_i, t_j).
std::uint32_t pattern_of(const std::vector<std::vector<std::uint8_t>>& adj, const Tuple& t) {
  std::uint32_t code = 0;
  const auto len = static_cast<std::uint32_t>(t.size());
  for (std::uint32_t i = 0; i < len; ++i)
    for (std::uint32_t j = 0; j < len; ++j)
      if (adj[t[i]][t[j]]) code |= 1u << (i * len + j);
  return code;
}

template <class F>
void for_fresh_extensions(std::uint32_t size, Tuple& t, std::size_t len, F&& f) {
  if (len == 0) {
    f(t);
    return;
  }
  for (std::uint32_t x = 0; x < size; ++x) {
    if (std::find(t.begin(), t.end(), x) != t.end()) continue;
    t.push_back(x);
    for_fresh_extensions(size, t, len - 1, f);
    t.pop_back();
  }
}

bool includes_sorted(const std::vector<std::uint32_t>& big, const std::vector<std::uint32_t>& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

KarpTables::KarpTables(const std::vector<Snapshot>& reps, unsigned var_bound) : budget_(var_bound) {
  if (var_bound > 4) throw std::invalid_argument("KarpTables: var_bound above 4");
  for (const auto& s : reps) {
    if (s.vocab().size() != 1 || s.vocab()[0].arity != 2 || s.size() > 4)
      throw std::invalid_argument("KarpTables: single binary relation on at most 4 elements expected");
    std::vector<std::vector<std::uint8_t>> adj(s.size(), std::vector<std::uint8_t>(s.size(), 0));
    for (const auto& t : s.relation(0)) adj[t[0]][t[1]] = 1;
    std::vector<std::vector<Sig>> by_len(budget_ + 1);
    for (unsigned j = 0; j <= budget_; ++j) {
      std::set<Sig> sigs;
      Tuple x;
      for_fresh_extensions(s.size(), x, j, [&](Tuple& xt) {
        Sig sig;
        sig.pattern = pattern_of(adj, xt);
        for (unsigned l = 0; l + j <= budget_; ++l) {
          std::set<std::uint32_t> codes;
          Tuple y = xt;
          for_fresh_extensions(s.size(), y, l, [&](Tuple& yt) { codes.insert(pattern_of(adj, yt)); });
          sig.ext.emplace_back(codes.begin(), codes.end());
        }
        sigs.insert(std::move(sig));
      });
      by_len[j].assign(sigs.begin(), sigs.end());
    }
    game_.push_back(std::move(by_len));
    oracle_.push_back({theory_profile(s, 1, var_bound), theory_profile(s, 2, var_bound)});
  }
}

bool KarpTables::game_leq(std::size_t a, std::size_t b, unsigned n) const {
  if (n > 2) throw std::invalid_argument("KarpTables: n above 2");
  if (n == 0) return true;
  const auto& A = game_[a];
  const auto& B = game_[b];
  // Round β = 0: every fresh d̄ in B has a c̄ in A with the same pattern.
  const auto& ea = A[0][0].ext;
  const auto& eb = B[0][0].ext;
  for (unsigned l = 1; l <= budget_; ++l)
    if (!includes_sorted(ea[l], eb[l])) return false;
  if (n == 1) return true;
  // Round β = 1: ∀d̄ ∈ B ∃c̄ ∈ A (B, d̄) ≤1 (A, c̄), i.e. every fresh
  // extension ē of c̄ in A is matched by some f̄ over d̄ in B.
  for (unsigned j = 0; j <= budget_; ++j) {
    for (const auto& d : B[j]) {
      bool found = false;
      for (const auto& c : A[j]) {
        if (c.pattern != d.pattern) continue;
        bool ok = true;
        for (unsigned l = 1; l + j <= budget_ && ok; ++l) ok = includes_sorted(d.ext[l], c.ext[l]);
        if (ok) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
  }
  return true;
}

bool KarpTables::oracle_leq(std::size_t a, std::size_t b, unsigned n) const {
  if (n > 2) throw std::invalid_argument("KarpTables: n above 2");
  if (n == 0) return true;
  return pi_included(oracle_[a][n - 1], oracle_[b][n - 1]);
}

namespace {

void record(KarpSweepReport& r, std::size_t a, std::size_t b, unsigned n, bool game, bool oracle) {
  ++r.checks;
  if (game) ++r.true_counts[n];
  if (game != oracle) {
    ++r.discrepancies;
    if (r.examples.size() < 8) r.examples.emplace_back(a, b, n);
  }
}

void merge_into(KarpSweepReport& into, const KarpSweepReport& part) {
  into.checks += part.checks;
  into.discrepancies += part.discrepancies;
  for (std::size_t i = 0; i < 3; ++i) into.true_counts[i] += part.true_counts[i];
  for (const auto& e : part.examples)
    if (into.examples.size() < 8) into.examples.push_back(e);
}

void sweep_row(const KarpTables& t, std::size_t a, const std::vector<unsigned>& ns, KarpSweepReport& r) {
  for (std::size_t b = 0; b < t.size(); ++b)
    for (auto n : ns) record(r, a, b, n, t.game_leq(a, b, n), t.oracle_leq(a, b, n));
}

}  // namespace

KarpSweepReport karp_sweep_serial(const KarpTables& t, const std::vector<unsigned>& ns) {
  KarpSweepReport r;
  r.classes = t.size();
  for (std::size_t a = 0; a < t.size(); ++a) sweep_row(t, a, ns, r);
  return r;
}

KarpSweepReport karp_sweep_parallel(const KarpTables& t, const std::vector<unsigned>& ns) {
  const auto rows = static_cast<std::int64_t>(t.size());
  std::vector<KarpSweepReport> parts(t.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t a = 0; a < rows; ++a) sweep_row(t, static_cast<std::size_t>(a), ns, parts[static_cast<std::size_t>(a)]);
  // Merge in row order so the example list matches the serial sweep.
  KarpSweepReport r;
  r.classes = t.size();
  for (const auto& p : parts) merge_into(r, p);
  return r;
}

std::vector<SessionResult> session_sweep_serial(const Family& fam, const StructureDescriptor& target,
                                                const Learner& l, std::uint64_t horizon,
                                                const std::vector<std::uint64_t>& seeds) {
  std::vector<SessionResult> out;
  for (auto seed : seeds) out.push_back(run_session(fam, PresentationStream(target, seed), l.fresh(), horizon));
  return out;
}

std::vector<SessionResult> session_sweep_parallel(const Family& fam, const StructureDescriptor& target,
                                                  const Learner& l, std::uint64_t horizon,
                                                  const std::vector<std::uint64_t>& seeds) {
  std::vector<SessionResult> out(seeds.size());
  const auto count = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = run_session(fam, PresentationStream(target, seeds[k]), l.fresh(), horizon);
  }
  return out;
}

}  // namespace ulearn
