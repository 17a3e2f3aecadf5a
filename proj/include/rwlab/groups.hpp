#pragma once

// Canonical element encodings and word-metric machinery for the discrete
// test groups: Z^d, free groups F_k and lamplighter wreath products Z/qZ wr Z.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rwlab/common.hpp"

namespace rwlab {

enum class GroupKind { Zd, Free, Lamplighter };

struct GroupDesc {
  GroupKind kind = GroupKind::Zd;
  int param = 1;  // d, k or q

  bool operator==(const GroupDesc&) const = default;

  // CLI descriptor strings: z:d, free:k, lamplighter:q.
  static GroupDesc parse(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw invariant_violation("group descriptor: expected name:param");
    const std::string name = s.substr(0, colon);
    const int param = std::stoi(s.substr(colon + 1));
    if (param < 1) throw invariant_violation("group descriptor: parameter must be positive");
    if (name == "z") return {GroupKind::Zd, param};
    if (name == "free") return {GroupKind::Free, param};
    if (name == "lamplighter") {
      if (param < 2) throw invariant_violation("lamplighter: q >= 2 required");
      return {GroupKind::Lamplighter, param};
    }
    throw invariant_violation("unknown group descriptor: " + s);
  }

  std::string str() const {
    switch (kind) {
      case GroupKind::Zd: return "z:" + std::to_string(param);
      case GroupKind::Free: return "free:" + std::to_string(param);
      case GroupKind::Lamplighter: return "lamplighter:" + std::to_string(param);
    }
    return "?";
  }
};

// Canonical encoding, one flat int vector per element:
//   Zd          : the d coordinates
//   Free        : the reduced word, letters +-1..+-k
//   Lamplighter : [cursor, pos_0, lamp_0, pos_1, lamp_1, ...] with positions
//                 strictly increasing and lamps nonzero mod q
struct Elem {
  std::vector<std::int32_t> d;
  bool operator==(const Elem&) const = default;
};

struct ElemHash {
  std::size_t operator()(const Elem& e) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::int32_t v : e.d) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

class Group {
 public:
  explicit Group(GroupDesc desc) : desc_(desc) {}
  explicit Group(const std::string& descriptor) : desc_(GroupDesc::parse(descriptor)) {}

  const GroupDesc& desc() const { return desc_; }

  Elem identity() const {
    switch (desc_.kind) {
      case GroupKind::Zd: return Elem{std::vector<std::int32_t>(static_cast<std::size_t>(desc_.param), 0)};
      case GroupKind::Free: return Elem{};
      case GroupKind::Lamplighter: return Elem{{0}};
    }
    return Elem{};
  }

  bool is_identity(const Elem& e) const { return e == identity(); }

  Elem op(const Elem& g, const Elem& h) const {
    switch (desc_.kind) {
      case GroupKind::Zd: {
        if (g.d.size() != h.d.size()) throw invariant_violation("gc_op: mismatched groups");
        Elem r = g;
        for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] += h.d[i];
        return r;
      }
      case GroupKind::Free: {
        Elem r = g;
        for (std::int32_t letter : h.d) {
          if (!r.d.empty() && r.d.back() == -letter)
            r.d.pop_back();
          else
            r.d.push_back(letter);
        }
        return r;
      }
      case GroupKind::Lamplighter: {
        // lamps of h shifted by g's cursor, added mod q; cursors add
        const int q = desc_.param;
        const std::int32_t shift = g.d[0];
        Elem r;
        r.d.reserve(g.d.size() + h.d.size());
        r.d.push_back(g.d[0] + h.d[0]);
        std::size_t i = 1, j = 1;
        auto push = [&r](std::int32_t pos, std::int32_t lamp) {
          if (lamp != 0) {
            r.d.push_back(pos);
            r.d.push_back(lamp);
          }
        };
        while (i < g.d.size() || j < h.d.size()) {
          const std::int32_t pg = i < g.d.size() ? g.d[i] : INT32_MAX;
          const std::int32_t ph = j < h.d.size() ? h.d[j] + shift : INT32_MAX;
          if (pg < ph) {
            push(pg, g.d[i + 1]);
            i += 2;
          } else if (ph < pg) {
            push(ph, h.d[j + 1]);
            j += 2;
          } else {
            push(pg, (g.d[i + 1] + h.d[j + 1]) % q);
            i += 2;
            j += 2;
          }
        }
        return r;
      }
    }
    return Elem{};
  }

  Elem inverse(const Elem& g) const {
    switch (desc_.kind) {
      case GroupKind::Zd: {
        Elem r = g;
        for (auto& v : r.d) v = -v;
        return r;
      }
      case GroupKind::Free: {
        Elem r;
        r.d.reserve(g.d.size());
        for (auto it = g.d.rbegin(); it != g.d.rend(); ++it) r.d.push_back(-*it);
        return r;
      }
      case GroupKind::Lamplighter: {
        const int q = desc_.param;
        Elem r;
        r.d.reserve(g.d.size());
        r.d.push_back(-g.d[0]);
        for (std::size_t i = 1; i < g.d.size(); i += 2) {
          r.d.push_back(g.d[i] - g.d[0]);
          r.d.push_back((q - g.d[i + 1]) % q);
        }
        // positions stay sorted under the common shift
        return r;
      }
    }
    return Elem{};
  }

  // Standard symmetric generators: +-e_i / a_i^{+-1} / {t, t^-1, s, s^-1}.
  std::vector<Elem> standard_generators() const {
    std::vector<Elem> gens;
    switch (desc_.kind) {
      case GroupKind::Zd:
        for (int i = 0; i < desc_.param; ++i)
          for (int sgn : {1, -1}) {
            Elem e = identity();
            e.d[static_cast<std::size_t>(i)] = sgn;
            gens.push_back(e);
          }
        break;
      case GroupKind::Free:
        for (int i = 1; i <= desc_.param; ++i) {
          gens.push_back(Elem{{i}});
          gens.push_back(Elem{{-i}});
        }
        break;
      case GroupKind::Lamplighter: {
        gens.push_back(Elem{{1}});
        gens.push_back(Elem{{-1}});
        for (int v = 1; v < desc_.param; ++v) gens.push_back(Elem{{0, 0, v}});
        break;
      }
    }
    // dedupe (s = s^-1 when q = 2)
    std::vector<Elem> out;
    for (auto& g : gens)
      if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
    return out;
  }

  std::string format(const Elem& e) const {
    std::ostringstream os;
    switch (desc_.kind) {
      case GroupKind::Zd:
        os << "(";
        for (std::size_t i = 0; i < e.d.size(); ++i) os << (i ? "," : "") << e.d[i];
        os << ")";
        break;
      case GroupKind::Free:
        if (e.d.empty()) os << "e";
        for (std::size_t i = 0; i < e.d.size(); ++i) os << (i ? "." : "") << e.d[i];
        break;
      case GroupKind::Lamplighter:
        os << "c" << e.d[0];
        for (std::size_t i = 1; i < e.d.size(); i += 2) os << ";" << e.d[i] << ":" << e.d[i + 1];
        break;
    }
    return os.str();
  }

 private:
  GroupDesc desc_;
};

struct GeneratingSet {
  std::vector<Elem> elems;

  bool contains(const Elem& e) const { return std::find(elems.begin(), elems.end(), e) != elems.end(); }

  // Symmetric closure; the identity is kept only if explicitly listed.
  static GeneratingSet symmetric_closure(const Group& group, std::vector<Elem> base) {
    GeneratingSet s;
    for (auto& e : base) {
      if (!s.contains(e)) s.elems.push_back(e);
      Elem inv = group.inverse(e);
      if (!s.contains(inv)) s.elems.push_back(inv);
    }
    return s;
  }

  static GeneratingSet standard(const Group& group) {
    return symmetric_closure(group, group.standard_generators());
  }
};

// All elements at word distance <= r from the identity, with distances.
inline std::unordered_map<Elem, int, ElemHash> gc_ball(const Group& group, const GeneratingSet& gens, int r) {
  std::unordered_map<Elem, int, ElemHash> dist;
  dist.emplace(group.identity(), 0);
  std::vector<Elem> frontier{group.identity()};
  for (int level = 1; level <= r && !frontier.empty(); ++level) {
    std::vector<Elem> next;
    for (const Elem& g : frontier)
      for (const Elem& s : gens.elems) {
        Elem h = group.op(g, s);
        if (dist.emplace(h, level).second) next.push_back(std::move(h));
      }
    frontier = std::move(next);
  }
  return dist;
}

// Word length |g| via meet-in-the-middle BFS between e and g.
// Every discovered meeting point m yields an exact path length
// d(e,m) + d(m,g); once depth_a + depth_b reaches the best candidate,
// an optimal meeting has necessarily been recorded.
inline int gc_word_length(const Group& group, const Elem& g, const GeneratingSet& gens, int radius_cap = 64) {
  if (group.is_identity(g)) return 0;
  using Map = std::unordered_map<Elem, int, ElemHash>;
  Map dist_a{{group.identity(), 0}}, dist_b{{g, 0}};
  std::vector<Elem> front_a{group.identity()}, front_b{g};
  int depth_a = 0, depth_b = 0;
  int best = INT32_MAX;
  while (depth_a + depth_b < radius_cap && depth_a + depth_b < best) {
    const bool expand_a = front_a.size() <= front_b.size();
    auto& front = expand_a ? front_a : front_b;
    auto& seen = expand_a ? dist_a : dist_b;
    auto& other = expand_a ? dist_b : dist_a;
    int& depth = expand_a ? depth_a : depth_b;
    std::vector<Elem> next;
    for (const Elem& e : front)
      for (const Elem& s : gens.elems) {
        Elem h = group.op(e, s);
        if (seen.emplace(h, depth + 1).second) {
          auto it = other.find(h);
          if (it != other.end()) best = std::min(best, depth + 1 + it->second);
          next.push_back(std::move(h));
        }
      }
    ++depth;
    if (next.empty()) break;
    front = std::move(next);
  }
  if (best <= radius_cap) return best;
  throw invariant_violation("gc_word_length: element not found within radius cap " + std::to_string(radius_cap));
}

}  // namespace rwlab
