#include "ssg/element_store.hpp"

#include <mutex>

#include "ssg/errors.hpp"

namespace ssg {

ElementStore::ElementStore(const FamilySpec& spec, std::uint64_t chain_budget)
    : spec_(spec),
      degree_(spec.degree),
      stride_(1 + static_cast<std::size_t>(spec.degree)),
      chain_budget_(chain_budget) {
  slots_.assign(std::size_t{1} << 12, kEmpty);
  Tuple t{};
  t[0] = Perm(degree_).code();
  std::unique_lock lock(mutex_);
  append_locked(t);
  lock.unlock();
  for (const Perm& p : spec.zero_elements) {
    t[0] = p.code();
    rooted_.push_back(make(t));
  }
}

std::size_t ElementStore::node_count() const {
  std::shared_lock lock(mutex_);
  return count_;
}

std::size_t ElementStore::memo_size() const {
  std::shared_lock lock(mutex_);
  return memo_.size();
}

std::size_t ElementStore::hash_tuple(const Tuple& t) const {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < stride_; ++i) {
    h ^= t[i];
    h *= 1099511628211ull;
  }
  h ^= h >> 29;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 32;
  return static_cast<std::size_t>(h);
}

bool ElementStore::matches(NodeId n, const Tuple& t) const {
  const std::uint32_t* p = node(n);
  for (std::size_t i = 0; i < stride_; ++i) {
    if (p[i] != t[i]) return false;
  }
  return true;
}

NodeId ElementStore::find_locked(const Tuple& t) const {
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t i = hash_tuple(t) & mask;; i = (i + 1) & mask) {
    if (slots_[i] == kEmpty) return kEmpty;
    if (matches(slots_[i], t)) return slots_[i];
  }
}

void ElementStore::insert_slot_locked(NodeId n, std::size_t h) {
  const std::size_t mask = slots_.size() - 1;
  std::size_t i = h & mask;
  while (slots_[i] != kEmpty) i = (i + 1) & mask;
  slots_[i] = n;
}

NodeId ElementStore::append_locked(const Tuple& t) {
  if (count_ >= kChunkNodes * kMaxChunks - 2) throw BudgetExceeded("node store is full");
  const NodeId id = static_cast<NodeId>(count_);
  const std::size_t chunk = id >> kChunkBits;
  if (chunks_[chunk].load(std::memory_order_relaxed) == nullptr) {
    owned_.push_back(std::make_unique<std::uint32_t[]>(kChunkNodes * stride_));
    chunks_[chunk].store(owned_.back().get(), std::memory_order_release);
  }
  std::uint32_t* p = chunks_[chunk].load(std::memory_order_relaxed) + (id & (kChunkNodes - 1)) * stride_;
  for (std::size_t i = 0; i < stride_; ++i) p[i] = t[i];
  ++count_;
  if (2 * count_ > slots_.size()) {
    slots_.assign(slots_.size() * 2, kEmpty);
    Tuple u{};
    for (std::size_t n = 0; n < count_; ++n) {
      const std::uint32_t* q = node(static_cast<NodeId>(n));
      for (std::size_t i = 0; i < stride_; ++i) u[i] = q[i];
      insert_slot_locked(static_cast<NodeId>(n), hash_tuple(u));
    }
  } else {
    insert_slot_locked(id, hash_tuple(t));
  }
  return id;
}

NodeId ElementStore::make(const Tuple& t) {
  {
    std::shared_lock lock(mutex_);
    NodeId f = find_locked(t);
    if (f != kEmpty) return f;
  }
  std::unique_lock lock(mutex_);
  NodeId f = find_locked(t);
  if (f != kEmpty) return f;
  return append_locked(t);
}

NodeId ElementStore::intern(std::size_t level_idx, const Word& w) {
  return intern_rec(level_idx, w, false);
}

NodeId ElementStore::intern_rec(std::size_t level_idx, const Word& w, bool remember) {
  if (w.is_zero()) return rooted_[w.zero_at(0)];
  if (remember) {
    std::shared_lock lock(mutex_);
    auto it = memo_.find(MemoKey{static_cast<std::uint32_t>(level_idx), w});
    if (it != memo_.end()) return it->second;
  }
  const std::size_t m = w.units();

  // Follow the section that keeps all m units until the units split, a known
  // word is reached, or the chain returns to one of its own states.
  struct Step {
    std::uint32_t level;
    Word word;
    std::vector<std::uint32_t> symbol;  // root, then children with kHeavy marking the chain
    bool remember;
  };
  std::vector<Step> chain;
  std::unordered_map<MemoKey, std::size_t, MemoHash> on_chain;
  std::size_t cur_idx = level_idx;
  Word cur = w;
  bool cur_remember = remember;
  NodeId tail = kEmpty;
  std::size_t cycle_start = chain.max_size();
  for (;;) {
    Decomposition d = decompose(spec_, cur_idx, cur);
    const std::size_t next = spec_.next_index(cur_idx);
    int heavy = -1;
    for (int x = 0; x < degree_; ++x) {
      if (d.sections[x].units() == m) heavy = x;
    }
    if (heavy < 0) {
      Tuple t{};
      t[0] = d.root.code();
      for (int x = 0; x < degree_; ++x) t[1 + x] = intern_rec(next, d.sections[x], true);
      tail = make(t);
      if (cur_remember) {
        std::unique_lock lock(mutex_);
        memo_.emplace(MemoKey{static_cast<std::uint32_t>(cur_idx), std::move(cur)}, tail);
      }
      break;
    }
    std::vector<std::uint32_t> symbol(stride_);
    symbol[0] = d.root.code();
    for (int x = 0; x < degree_; ++x) {
      symbol[1 + x] = x == heavy ? kHeavy : rooted_[d.sections[x].zero_at(0)];
    }
    on_chain.emplace(MemoKey{static_cast<std::uint32_t>(cur_idx), cur}, chain.size());
    chain.push_back({static_cast<std::uint32_t>(cur_idx), std::move(cur), std::move(symbol), cur_remember});
    if (chain.size() > chain_budget_) throw BudgetExceeded("section chain exceeded the budget");

    MemoKey key{static_cast<std::uint32_t>(next), std::move(d.sections[heavy])};
    {
      std::shared_lock lock(mutex_);
      auto it = memo_.find(key);
      if (it != memo_.end()) {
        tail = it->second;
        break;
      }
    }
    if (auto it = on_chain.find(key); it != on_chain.end()) {
      cycle_start = it->second;
      break;
    }
    cur_idx = next;
    cur = std::move(key.word);
    cur_remember = true;
  }
  if (chain.empty()) return tail;

  std::vector<NodeId> ids(chain.size(), kEmpty);
  std::size_t end = chain.size();
  if (cycle_start < chain.size()) {
    std::vector<std::vector<std::uint32_t>> symbols;
    for (std::size_t i = cycle_start; i < chain.size(); ++i) symbols.push_back(chain[i].symbol);
    std::vector<NodeId> cyc = register_cycle(symbols);
    for (std::size_t i = cycle_start; i < chain.size(); ++i) ids[i] = cyc[i - cycle_start];
    end = cycle_start;
  }
  for (std::size_t i = end; i-- > 0;) {
    Tuple t{};
    for (std::size_t k = 0; k < stride_; ++k) {
      const std::uint32_t v = chain[i].symbol[k];
      t[k] = v == kHeavy ? (i + 1 < chain.size() ? ids[i + 1] : tail) : v;
    }
    ids[i] = make(t);
  }
  std::unique_lock lock(mutex_);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i].remember) memo_.emplace(MemoKey{chain[i].level, std::move(chain[i].word)}, ids[i]);
  }
  return ids[0];
}

std::vector<NodeId> ElementStore::register_cycle(const std::vector<std::vector<std::uint32_t>>& symbols) {
  const std::size_t len = symbols.size();
  std::size_t q = len;
  for (std::size_t c = 1; c < len; ++c) {
    if (len % c) continue;
    bool ok = true;
    for (std::size_t i = c; i < len && ok; ++i) ok = symbols[i] == symbols[i - c];
    if (ok) {
      q = c;
      break;
    }
  }

  const std::uint32_t id_code = Perm(degree_).code();
  bool trivial = true;
  for (std::size_t i = 0; i < q && trivial; ++i) {
    trivial = symbols[i][0] == id_code;
    for (std::size_t k = 1; k < stride_ && trivial; ++k) {
      trivial = symbols[i][k] == kHeavy || symbols[i][k] == identity();
    }
  }
  if (trivial) return std::vector<NodeId>(len, identity());

  // Least rotation of the primitive period is the canonical key.
  std::size_t r = 0;
  for (std::size_t c = 1; c < q; ++c) {
    for (std::size_t j = 0; j < q; ++j) {
      const auto& a = symbols[(c + j) % q];
      const auto& b = symbols[(r + j) % q];
      if (a != b) {
        if (a < b) r = c;
        break;
      }
    }
  }
  std::vector<std::uint32_t> key;
  for (std::size_t j = 0; j < q; ++j) {
    const auto& s = symbols[(r + j) % q];
    key.insert(key.end(), s.begin(), s.end());
  }

  std::vector<NodeId> canon;
  {
    std::unique_lock lock(mutex_);
    auto it = lassos_.find(key);
    if (it != lassos_.end()) {
      canon = it->second;
    } else {
      const NodeId base = static_cast<NodeId>(count_);
      for (std::size_t j = 0; j < q; ++j) {
        Tuple t{};
        const auto& s = symbols[(r + j) % q];
        for (std::size_t k = 0; k < stride_; ++k) {
          t[k] = s[k] == kHeavy ? base + static_cast<NodeId>((j + 1) % q) : s[k];
        }
        canon.push_back(append_locked(t));
      }
      lassos_.emplace(std::move(key), canon);
    }
  }
  std::vector<NodeId> out(len);
  for (std::size_t i = 0; i < len; ++i) out[i] = canon[(i % q + q - r) % q];
  return out;
}

}  // namespace ssg
