#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "ssg/tree.hpp"

namespace ssg {

using NodeId = std::uint32_t;

// Exact hash-consing of tree automorphisms. A node is a root permutation and
// d child nodes; equal automorphisms get equal ids, across all levels of the
// family. Self-similar sections (a section chain that returns to an earlier
// word) become cycles in the node graph, registered once per primitive
// symbol sequence so that they stay canonical.
//
// Lookups run under a shared lock, inserts under an exclusive one; ids are
// stable and node storage is never moved.
class ElementStore {
 public:
  explicit ElementStore(const FamilySpec& spec, std::uint64_t chain_budget = kDefaultIdentityBudget);
  ElementStore(const ElementStore&) = delete;
  ElementStore& operator=(const ElementStore&) = delete;

  NodeId intern(std::size_t level_idx, const Word& w);
  NodeId intern(const Element& g) { return intern(spec_.level_index(g.level), g.word); }

  static constexpr NodeId identity() { return 0; }
  NodeId rooted(Letter z) const { return rooted_[z]; }

  Perm root(NodeId n) const { return Perm::from_code(degree_, node(n)[0]); }
  NodeId child(NodeId n, int x) const { return node(n)[1 + x]; }

  std::size_t node_count() const;
  std::size_t memo_size() const;
  const FamilySpec& spec() const { return spec_; }

 private:
  static constexpr unsigned kChunkBits = 16;
  static constexpr std::size_t kChunkNodes = std::size_t{1} << kChunkBits;
  static constexpr std::size_t kMaxChunks = std::size_t{1} << 16;
  static constexpr NodeId kEmpty = 0xffffffffu;
  static constexpr NodeId kHeavy = 0xfffffffeu;

  using Tuple = std::array<std::uint32_t, 1 + kMaxDegree>;

  struct MemoKey {
    std::uint32_t level;
    Word word;
    bool operator==(const MemoKey&) const = default;
  };
  struct MemoHash {
    std::size_t operator()(const MemoKey& k) const noexcept {
      return WordHash{}(k.word) ^ (std::size_t{k.level} * 0x9e3779b97f4a7c15ull);
    }
  };

  const std::uint32_t* node(NodeId n) const {
    return chunks_[n >> kChunkBits].load(std::memory_order_acquire) +
           (n & (kChunkNodes - 1)) * stride_;
  }
  std::size_t hash_tuple(const Tuple& t) const;
  bool matches(NodeId n, const Tuple& t) const;
  NodeId find_locked(const Tuple& t) const;
  NodeId append_locked(const Tuple& t);
  void insert_slot_locked(NodeId n, std::size_t h);

  NodeId make(const Tuple& t);
  NodeId intern_rec(std::size_t level_idx, const Word& w, bool remember);
  std::vector<NodeId> register_cycle(const std::vector<std::vector<std::uint32_t>>& symbols);
  std::uint32_t perm_code(const Perm& p) const { return p.code(); }

  const FamilySpec& spec_;
  const int degree_;
  const std::size_t stride_;
  const std::uint64_t chain_budget_;

  mutable std::shared_mutex mutex_;
  std::array<std::atomic<std::uint32_t*>, kMaxChunks> chunks_{};
  std::vector<std::unique_ptr<std::uint32_t[]>> owned_;
  std::size_t count_ = 0;
  std::vector<NodeId> slots_;  // open addressing over node contents
  std::unordered_map<MemoKey, NodeId, MemoHash> memo_;
  std::map<std::vector<std::uint32_t>, std::vector<NodeId>> lassos_;
  std::vector<NodeId> rooted_;
};

}  // namespace ssg
