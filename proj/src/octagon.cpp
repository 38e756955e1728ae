#include "mca/octagon.hpp"

#include <algorithm>
#include <cassert>

namespace mca {

using dbm::kInf;

int Octagon::index_of(MemLocId id) const {
  auto it = std::lower_bound(
      vars_.begin(), vars_.end(), id,
      [](const VarInfo &v, MemLocId x) { return v.id < x; });
  if (it == vars_.end() || it->id != id) return -1;
  return (int)(it - vars_.begin());
}

Octagon Octagon::top(std::vector<VarInfo> vars) {
  std::sort(vars.begin(), vars.end(),
            [](const VarInfo &a, const VarInfo &b) { return a.id < b.id; });
  for (size_t i = 1; i < vars.size(); ++i)
    assert(vars[i - 1].id != vars[i].id && "duplicate octagon variable");
  Octagon o;
  o.vars_ = std::move(vars);
  int n2 = o.n2();
  o.m_.assign((size_t)n2 * n2, kInf);
  for (int i = 0; i < n2; ++i) o.at(i, i) = 0;
  o.clamp_to_types();
  o.closed_ = false;
  return o;
}

Octagon Octagon::bottom(std::vector<VarInfo> vars) {
  Octagon o = top(std::move(vars));
  o.bottom_ = true;
  o.m_.clear();
  o.closed_ = true;
  return o;
}

void Octagon::clamp_to_types() {
  for (size_t k = 0; k < vars_.size(); ++k) {
    int a = 2 * (int)k, b = a + 1;
    at(b, a) = std::min(at(b, a), 2 * vars_[k].tmax);
    at(a, b) = std::min(at(a, b), -2 * vars_[k].tmin);
  }
}

void Octagon::set_entry(int i, int j, int64_t v) {
  if (v < at(i, j)) {
    at(i, j) = v;
    at(j ^ 1, i ^ 1) = v;  // coherence
    closed_ = false;
  }
}

void Octagon::forget(int k) {
  int a = 2 * k, b = a + 1;
  int n = n2();
  for (int i = 0; i < n; ++i) {
    at(a, i) = at(i, a) = at(b, i) = at(i, b) = kInf;
  }
  at(a, a) = at(b, b) = 0;
  // a closed matrix stays closed when a variable becomes unconstrained
}

void Octagon::ensure_closed_inplace() {
  if (bottom_ || closed_) return;
  if (!dbm::tight_close(m_, n2())) {
    bottom_ = true;
    m_.clear();
  }
  closed_ = true;
}

Octagon Octagon::closed() const {
  if (closed_ || bottom_) return *this;
  Octagon o = *this;
  o.ensure_closed_inplace();
  return o;
}

Interval Octagon::bounds_by_index(int k) const {
  assert(closed_ && !bottom_);
  int a = 2 * k, b = a + 1;
  int64_t hi = at(b, a);
  int64_t lo = at(a, b);
  int64_t out_hi = hi >= kInf ? vars_[k].tmax
                              : std::min(dbm::floor_div2(hi), vars_[k].tmax);
  int64_t out_lo = lo >= kInf ? vars_[k].tmin
                              : std::max(-dbm::floor_div2(lo), vars_[k].tmin);
  return {out_lo, out_hi};
}

Interval Octagon::bounds(MemLocId id) const {
  int k = index_of(id);
  assert(k >= 0 && "bounds() of an untracked location");
  if (bottom_) return Interval::empty();
  if (closed_) return bounds_by_index(k);
  Octagon c = closed();
  if (c.bottom_) return Interval::empty();
  return c.bounds_by_index(k);
}

Octagon Octagon::assign_interval(MemLocId x, Interval v) const {
  int k = index_of(x);
  assert(k >= 0);
  if (bottom_) return *this;
  Octagon o = closed();
  if (o.bottom_) return o;
  v = v.meet({vars_[k].tmin, vars_[k].tmax});
  if (v.is_empty()) return bottom(vars_);
  o.forget(k);
  int a = 2 * k, b = a + 1;
  o.at(b, a) = 2 * v.hi;
  o.at(a, b) = -2 * v.lo;
  o.closed_ = false;
  o.ensure_closed_inplace();
  return o;
}

Octagon Octagon::assign_const(MemLocId x, int64_t c) const {
  return assign_interval(x, Interval::point(c));
}

Octagon Octagon::weak_update(MemLocId x, Interval v) const {
  if (bottom_) return *this;
  return join(*this, assign_interval(x, v));
}

Octagon Octagon::assign_affine(MemLocId x, MemLocId y, int sign,
                               int64_t c) const {
  assert(sign == 1 || sign == -1);
  int kx = index_of(x), ky = index_of(y);
  assert(kx >= 0 && ky >= 0);
  if (bottom_) return *this;

  Octagon o = closed();
  if (o.bottom_) return o;
  Interval by = o.bounds_by_index(ky);
  Interval rhs = sign > 0 ? Interval{by.lo + c, by.hi + c}
                          : Interval{-by.hi + c, -by.lo + c};
  // Out-of-range results take the whole type range (no wrapping model).
  if (rhs.lo < vars_[kx].tmin || rhs.hi > vars_[kx].tmax)
    return o.assign_interval(x, {vars_[kx].tmin, vars_[kx].tmax});

  if (kx == ky) {
    if (sign > 0) {
      // translate x by c; closure is preserved
      int a = 2 * kx, b = a + 1;
      int n = o.n2();
      for (int i = 0; i < n; ++i) {
        if (i == a || i == b) continue;
        if (o.at(a, i) < kInf) o.at(a, i) -= c;
        if (o.at(i, a) < kInf) o.at(i, a) += c;
        if (o.at(b, i) < kInf) o.at(b, i) += c;
        if (o.at(i, b) < kInf) o.at(i, b) -= c;
      }
      if (o.at(b, a) < kInf) o.at(b, a) += 2 * c;
      if (o.at(a, b) < kInf) o.at(a, b) -= 2 * c;
      return o;
    }
    // x := -x + c via a scratch copy through the negated form:
    // new x relates to old x by x' + x = c (exact).
    Octagon tmp = o;
    int a = 2 * kx, b = a + 1;
    int n = o.n2();
    // swap the +x / -x vertices (x -> -x), then translate by c
    for (int i = 0; i < n; ++i) {
      std::swap(tmp.at(a, i), tmp.at(b, i));
    }
    for (int i = 0; i < n; ++i) {
      std::swap(tmp.at(i, a), tmp.at(i, b));
    }
    for (int i = 0; i < n; ++i) {
      if (i == a || i == b) continue;
      if (tmp.at(a, i) < kInf) tmp.at(a, i) -= c;
      if (tmp.at(i, a) < kInf) tmp.at(i, a) += c;
      if (tmp.at(b, i) < kInf) tmp.at(b, i) += c;
      if (tmp.at(i, b) < kInf) tmp.at(i, b) -= c;
    }
    if (tmp.at(b, a) < kInf) tmp.at(b, a) += 2 * c;
    if (tmp.at(a, b) < kInf) tmp.at(a, b) -= 2 * c;
    return tmp;
  }

  o.forget(kx);
  int ax = 2 * kx, ay = 2 * ky;
  if (sign > 0) {
    // x - y <= c and y - x <= -c
    o.set_entry(ay, ax, c);
    o.set_entry(ax, ay, -c);
  } else {
    // x + y <= c and -x - y <= -c
    o.set_entry(ay ^ 1, ax, c);
    o.set_entry(ay, ax ^ 1, -c);
  }
  o.ensure_closed_inplace();
  return o;
}

Octagon Octagon::guard_le(MemLocId x, int sign_x, int64_t c) const {
  int k = index_of(x);
  assert(k >= 0);
  if (bottom_) return *this;
  Octagon o = closed();
  if (o.bottom_) return o;
  int a = 2 * k, b = a + 1;
  if (sign_x > 0)
    o.set_entry(b, a, 2 * c);
  else
    o.set_entry(a, b, 2 * c);
  o.ensure_closed_inplace();
  return o;
}

Octagon Octagon::guard_le2(MemLocId x, int sign_x, MemLocId y, int sign_y,
                           int64_t c) const {
  int kx = index_of(x), ky = index_of(y);
  assert(kx >= 0 && ky >= 0 && kx != ky);
  if (bottom_) return *this;
  Octagon o = closed();
  if (o.bottom_) return o;
  int ax = 2 * kx, ay = 2 * ky;
  if (sign_x > 0 && sign_y < 0) {
    o.set_entry(ay, ax, c);  // x - y <= c
  } else if (sign_x < 0 && sign_y > 0) {
    o.set_entry(ax, ay, c);  // y - x <= c
  } else if (sign_x > 0 && sign_y > 0) {
    o.set_entry(ay ^ 1, ax, c);  // x + y <= c
  } else {
    o.set_entry(ay, ax ^ 1, c);  // -x - y <= c
  }
  o.ensure_closed_inplace();
  return o;
}

Octagon Octagon::join(const Octagon &a, const Octagon &b) {
  assert(a.vars_.size() == b.vars_.size());
  if (a.bottom_) return b.closed();
  if (b.bottom_) return a.closed();
  Octagon ca = a.closed(), cb = b.closed();
  if (ca.bottom_) return cb;
  if (cb.bottom_) return ca;
  Octagon out = ca;
  for (size_t i = 0; i < out.m_.size(); ++i)
    out.m_[i] = std::max(ca.m_[i], cb.m_[i]);
  // pointwise max of tightly closed matrices is tightly closed
  out.closed_ = true;
  return out;
}

int64_t Octagon::threshold(int i, int j) const {
  if (i == j) return 0;
  auto rng_lo = [&](int v) {
    const VarInfo &k = vars_[v / 2];
    return (v & 1) ? -k.tmax : k.tmin;
  };
  auto rng_hi = [&](int v) {
    const VarInfo &k = vars_[v / 2];
    return (v & 1) ? -k.tmin : k.tmax;
  };
  return rng_hi(j) - rng_lo(i);
}

Octagon Octagon::widen(const Octagon &a, const Octagon &b) {
  assert(a.vars_.size() == b.vars_.size());
  if (a.bottom_) return b.closed();
  if (b.bottom_) return a;
  Octagon cb = b.closed();
  if (cb.bottom_) return a;
  Octagon out = a;  // raw form: the per-entry ratchet must see the stored
                    // matrix, not its closure
  if (out.m_.empty()) return cb;
  for (int i = 0; i < out.n2(); ++i) {
    for (int j = 0; j < out.n2(); ++j) {
      int64_t av = out.at(i, j), bv = cb.at(i, j);
      if (bv <= av) continue;
      int64_t thr = out.threshold(i, j);
      out.at(i, j) = bv <= thr ? thr : kInf;
    }
  }
  out.closed_ = false;
  return out;
}

bool Octagon::leq(const Octagon &a, const Octagon &b) {
  assert(a.vars_.size() == b.vars_.size());
  if (a.bottom_) return true;
  Octagon ca = a.closed(), cb = b.closed();
  if (ca.bottom_) return true;
  if (cb.bottom_) return false;
  for (size_t i = 0; i < ca.m_.size(); ++i)
    if (ca.m_[i] > cb.m_[i]) return false;
  return true;
}

bool Octagon::same_repr(const Octagon &a, const Octagon &b) {
  return a.bottom_ == b.bottom_ && a.vars_.size() == b.vars_.size() &&
         a.m_ == b.m_;
}

bool operator==(const Octagon &a, const Octagon &b) {
  if (a.vars_.size() != b.vars_.size()) return false;
  for (size_t i = 0; i < a.vars_.size(); ++i)
    if (a.vars_[i].id != b.vars_[i].id) return false;
  Octagon ca = a.closed(), cb = b.closed();
  if (ca.bottom_ != cb.bottom_) return false;
  if (ca.bottom_) return true;
  return ca.m_ == cb.m_;
}

Octagon Octagon::restrict_to(const std::vector<MemLocId> &keep) const {
  std::vector<int> kept;
  std::vector<VarInfo> nv;
  for (MemLocId id : keep) {
    int k = index_of(id);
    assert(k >= 0 && "restrict: location not tracked");
    kept.push_back(k);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  for (int k : kept) nv.push_back(vars_[k]);

  if (bottom_) return bottom(nv);
  Octagon src = closed();
  if (src.bottom_) return bottom(nv);
  Octagon out;
  out.vars_ = nv;
  int n2 = out.n2();
  out.m_.assign((size_t)n2 * n2, kInf);
  for (size_t i = 0; i < kept.size(); ++i) {
    for (size_t j = 0; j < kept.size(); ++j) {
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
          out.at(2 * (int)i + di, 2 * (int)j + dj) =
              src.at(2 * kept[i] + di, 2 * kept[j] + dj);
    }
  }
  out.closed_ = true;  // projection of a closed matrix is closed
  return out;
}

Octagon Octagon::extended(const std::vector<VarInfo> &extra) const {
  if (extra.empty()) return *this;
  std::vector<VarInfo> nv = vars_;
  for (const VarInfo &v : extra) {
    assert(index_of(v.id) < 0 && "extended: variable already present");
    nv.push_back(v);
  }
  Octagon out = top(std::move(nv));
  if (bottom_) {
    out.bottom_ = true;
    out.m_.clear();
    out.closed_ = true;
    return out;
  }
  for (size_t i = 0; i < vars_.size(); ++i) {
    int ni = 2 * out.index_of(vars_[i].id);
    for (size_t j = 0; j < vars_.size(); ++j) {
      int nj = 2 * out.index_of(vars_[j].id);
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
          out.at(ni + di, nj + dj) =
              std::min(out.at(ni + di, nj + dj), at(2 * (int)i + di, 2 * (int)j + dj));
    }
  }
  out.closed_ = false;
  return out;
}

Octagon Octagon::embed(const Octagon &small,
                       const std::vector<MemLocId> &modified) const {
  if (bottom_) return *this;
  if (small.is_bottom()) {
    Octagon out = bottom(vars_);
    return out;
  }
  Octagon out = closed();
  if (out.bottom_) return out;
  Octagon s = small.closed();
  if (s.bottom_) return bottom(vars_);

  for (MemLocId id : modified) {
    int k = out.index_of(id);
    assert(k >= 0 && "embed: modified location not tracked");
    out.forget(k);
  }
  for (size_t i = 0; i < s.vars_.size(); ++i) {
    int oi = out.index_of(s.vars_[i].id);
    assert(oi >= 0 && "embed: small/vars not a subset");
    for (size_t j = 0; j < s.vars_.size(); ++j) {
      int oj = out.index_of(s.vars_[j].id);
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) {
          int64_t v = s.at(2 * (int)i + di, 2 * (int)j + dj);
          if (v < out.at(2 * oi + di, 2 * oj + dj))
            out.at(2 * oi + di, 2 * oj + dj) = v;
        }
    }
  }
  out.closed_ = false;
  out.ensure_closed_inplace();
  return out;
}

std::vector<std::string> Octagon::describe(const MemLocTable &t) const {
  std::vector<std::string> lines;
  if (bottom_) {
    lines.push_back("<unreachable>");
    return lines;
  }
  Octagon c = closed();
  if (c.bottom_) {
    lines.push_back("<unreachable>");
    return lines;
  }
  for (size_t k = 0; k < c.vars_.size(); ++k) {
    Interval b = c.bounds_by_index((int)k);
    lines.push_back(std::to_string(b.lo) + " <= " + t.name(c.vars_[k].id) +
                    " <= " + std::to_string(b.hi));
  }
  for (size_t i = 0; i < c.vars_.size(); ++i) {
    for (size_t j = i + 1; j < c.vars_.size(); ++j) {
      const std::string xi = t.name(c.vars_[i].id);
      const std::string xj = t.name(c.vars_[j].id);
      int a = 2 * (int)i, b = 2 * (int)j;
      struct Rel {
        int from, to;
        std::string text;
      };
      Rel rels[4] = {
          {a, b, xj + " - " + xi + " <= "},
          {b, a, xi + " - " + xj + " <= "},
          {a ^ 1, b, xj + " + " + xi + " <= "},
          {a, b ^ 1, "-" + xj + " - " + xi + " <= "},
      };
      for (const Rel &r : rels) {
        int64_t v = c.at(r.from, r.to);
        if (v < c.threshold(r.from, r.to))
          lines.push_back(r.text + std::to_string(v));
      }
    }
  }
  return lines;
}

}  // namespace mca
