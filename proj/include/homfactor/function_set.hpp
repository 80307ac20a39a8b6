#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "homfactor/errors.hpp"

namespace homfactor {

// Set of functions with a common domain, the working currency of circuit
// semantics and rectangles. `vars` is the sorted list of variable indices;
// each function is one row of `rows` (stride = vars.size()), rows sorted
// lexicographically and duplicate-free. The empty-domain set distinguishes
// {} (nrows 0) from {empty function} (nrows 1), hence the explicit counter.
struct FunctionSet {
  std::vector<int> vars;
  std::size_t nrows = 0;
  std::vector<std::int32_t> rows;

  std::size_t arity() const { return vars.size(); }
  std::size_t size() const { return nrows; }
  bool empty() const { return nrows == 0; }

  const std::int32_t* row(std::size_t i) const { return rows.data() + i * arity(); }

  static FunctionSet empty_set(std::vector<int> vars) {
    FunctionSet f;
    f.vars = std::move(vars);
    return f;
  }

  // {epsilon}: one function with empty domain.
  static FunctionSet unit() {
    FunctionSet f;
    f.nrows = 1;
    return f;
  }

  void push_row(const std::vector<std::int32_t>& r) {
    if (r.size() != arity()) throw BadScope("FunctionSet row arity mismatch");
    rows.insert(rows.end(), r.begin(), r.end());
    ++nrows;
  }

  // Restore the sorted/unique invariant after a batch of push_row calls.
  void normalize() {
    std::size_t w = arity();
    if (w == 0) {
      nrows = nrows > 0 ? 1 : 0;
      rows.clear();
      return;
    }
    std::vector<std::size_t> idx(nrows);
    for (std::size_t i = 0; i < nrows; ++i) idx[i] = i;
    auto cmp = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(rows.begin() + a * w, rows.begin() + (a + 1) * w,
                                          rows.begin() + b * w, rows.begin() + (b + 1) * w);
    };
    std::sort(idx.begin(), idx.end(), cmp);
    std::vector<std::int32_t> out;
    out.reserve(rows.size());
    std::size_t kept = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::int32_t* r = rows.data() + idx[k] * w;
      if (kept > 0 && std::equal(r, r + w, out.end() - w)) continue;
      out.insert(out.end(), r, r + w);
      ++kept;
    }
    rows = std::move(out);
    nrows = kept;
  }

  bool contains(const std::int32_t* r) const {
    std::size_t w = arity();
    if (w == 0) return nrows > 0;
    std::size_t lo = 0, hi = nrows;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      const std::int32_t* m = row(mid);
      if (std::lexicographical_compare(m, m + w, r, r + w))
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo < nrows && std::equal(r, r + w, row(lo));
  }

  bool operator==(const FunctionSet&) const = default;
};

// Union of two sets over the same variable list. Linear merge; reports via
// `collided` whether the operands intersect (used by determinism checking).
inline FunctionSet set_union(const FunctionSet& a, const FunctionSet& b, bool* collided = nullptr) {
  if (a.vars != b.vars) throw BadScope("set_union: domains differ");
  if (collided) *collided = false;
  std::size_t w = a.arity();
  if (w == 0) {
    if (collided) *collided = a.nrows > 0 && b.nrows > 0;
    FunctionSet f;
    f.nrows = (a.nrows > 0 || b.nrows > 0) ? 1 : 0;
    return f;
  }
  FunctionSet out;
  out.vars = a.vars;
  out.rows.reserve(a.rows.size() + b.rows.size());
  std::size_t i = 0, j = 0;
  auto cmp3 = [&](const std::int32_t* x, const std::int32_t* y) {
    for (std::size_t k = 0; k < w; ++k) {
      if (x[k] < y[k]) return -1;
      if (x[k] > y[k]) return 1;
    }
    return 0;
  };
  while (i < a.nrows || j < b.nrows) {
    int c = i == a.nrows ? 1 : j == b.nrows ? -1 : cmp3(a.row(i), b.row(j));
    const std::int32_t* r;
    if (c < 0) {
      r = a.row(i++);
    } else if (c > 0) {
      r = b.row(j++);
    } else {
      if (collided) *collided = true;
      r = a.row(i);
      ++i;
      ++j;
    }
    out.rows.insert(out.rows.end(), r, r + w);
    ++out.nrows;
  }
  return out;
}

// In-place variant: merge `b` into `a` (a may be moved-from storage being
// reused along a union chain, which keeps chain evaluation linear).
inline void set_union_into(FunctionSet& a, const FunctionSet& b, bool* collided = nullptr) {
  FunctionSet merged = set_union(a, b, collided);
  a = std::move(merged);
}

// Product of sets over disjoint variable lists; output variables are the
// sorted merge and each row interleaves the operands accordingly.
inline FunctionSet set_product(const FunctionSet& a, const FunctionSet& b) {
  for (int v : a.vars)
    for (int u : b.vars)
      if (u == v) throw BadScope("set_product: domains overlap");
  FunctionSet out;
  out.vars.resize(a.vars.size() + b.vars.size());
  std::merge(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), out.vars.begin());
  std::size_t w = out.vars.size();
  // position of each output column in (a|b)
  std::vector<std::pair<bool, std::size_t>> src(w);  // (from_a, index)
  {
    std::size_t ia = 0, ib = 0;
    for (std::size_t k = 0; k < w; ++k) {
      if (ia < a.vars.size() && (ib == b.vars.size() || a.vars[ia] < b.vars[ib]))
        src[k] = {true, ia++};
      else
        src[k] = {false, ib++};
    }
  }
  out.rows.reserve(a.nrows * b.nrows * w);
  // Row-major double loop emits rows already in lexicographic order of the
  // merged variable list only when a's vars all precede b's; normalize() after
  // the loop restores the invariant in general.
  for (std::size_t i = 0; i < a.nrows; ++i)
    for (std::size_t j = 0; j < b.nrows; ++j) {
      for (std::size_t k = 0; k < w; ++k)
        out.rows.push_back(src[k].first ? a.row(i)[src[k].second] : b.row(j)[src[k].second]);
      ++out.nrows;
    }
  out.normalize();
  return out;
}

// Restriction F|_S: project every function onto S (S must be a subset of the
// domain) and deduplicate.
inline FunctionSet restrict_set(const FunctionSet& f, const std::vector<int>& subset) {
  std::vector<int> s = subset;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<std::size_t> cols;
  cols.reserve(s.size());
  for (int v : s) {
    auto it = std::lower_bound(f.vars.begin(), f.vars.end(), v);
    if (it == f.vars.end() || *it != v) throw BadScope("restrict_set: variable not in domain");
    cols.push_back(static_cast<std::size_t>(it - f.vars.begin()));
  }
  FunctionSet out;
  out.vars = s;
  if (s.empty()) {
    out.nrows = f.nrows > 0 ? 1 : 0;
    return out;
  }
  out.rows.reserve(f.nrows * cols.size());
  for (std::size_t i = 0; i < f.nrows; ++i) {
    const std::int32_t* r = f.row(i);
    for (std::size_t c : cols) out.rows.push_back(r[c]);
    ++out.nrows;
  }
  out.normalize();
  return out;
}

}  // namespace homfactor
