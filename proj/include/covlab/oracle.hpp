#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "covlab/cover.hpp"

namespace covlab {

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Submeasure oracle handed to the thinness and chain machinery. at_least
// must answer exactly (an undecidable budget is an oracle failure).
// witness materializes the subfamily behind a CoverResult, when available.
struct MuOracle {
  std::function<CoverResult(const ClopenSet&)> eval;
  std::function<bool(const ClopenSet&, const DyadicWeight&)> at_least;
  std::function<WeightedClass(const ClopenSet&, const CoverResult&)> witness;
  std::string name;
};

// Cover submeasure over an explicit class, memoized; behaves as a pure
// function and is safe for concurrent readers.
class ClassOracle {
 public:
  ClassOracle(WeightedClass cls, std::uint64_t node_budget = kDefaultNodeBudget)
      : cls_(std::move(cls)), budget_(node_budget), index_(build_class_index(cls_)) {}

  const WeightedClass& cls() const { return cls_; }

  CoverResult eval(const ClopenSet& B) const {
    const std::string key = B.bits.to_hex();
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    CoverResult r = min_cover(cls_, B, budget_, &index_);
    std::lock_guard<std::mutex> lk(mu_);
    return memo_.emplace(key, std::move(r)).first->second;
  }

  bool at_least(const ClopenSet& B, const DyadicWeight& t) const {
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = memo_.find(B.bits.to_hex());
      if (it != memo_.end() && it->second.optimal) return it->second.value().at_least(t);
    }
    auto dec = min_cover_at_least(cls_, B, t, budget_, &index_);
    if (!dec.has_value())
      throw OracleError("cover oracle budget exhausted while deciding a threshold");
    return *dec;
  }

  WeightedClass witness_family(const CoverResult& r) const {
    WeightedClass w;
    w.ctx = cls_.ctx;
    w.label = cls_.label + "-witness";
    for (std::size_t i : r.witness) w.items.push_back(cls_.items[i]);
    return w;
  }

  MuOracle as_mu() const {
    return MuOracle{
        [this](const ClopenSet& B) { return eval(B); },
        [this](const ClopenSet& B, const DyadicWeight& t) { return at_least(B, t); },
        [this](const ClopenSet&, const CoverResult& r) { return witness_family(r); },
        cls_.label};
  }

 private:
  WeightedClass cls_;
  std::uint64_t budget_;
  ClassIndex index_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, CoverResult> memo_;
};

}  // namespace covlab
