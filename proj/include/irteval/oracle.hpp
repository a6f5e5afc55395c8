#pragma once

#include <optional>
#include <string>
#include <unordered_map>

namespace irteval {

/// Answer source for one test-taker: maps item_id to a correct/incorrect
/// outcome. Implementations must be safe for concurrent reads.
class ResponseOracle {
 public:
  virtual ~ResponseOracle() = default;

  /// Returns the response to `item_id`, or nullopt when the oracle has no
  /// answer for it.
  virtual std::optional<bool> answer(const std::string& item_id) const = 0;
};

/// Oracle backed by a fixed map of recorded responses.
class RecordedResponses final : public ResponseOracle {
 public:
  explicit RecordedResponses(std::unordered_map<std::string, bool> responses)
      : responses_(std::move(responses)) {}

  std::optional<bool> answer(const std::string& item_id) const override {
    const auto it = responses_.find(item_id);
    if (it == responses_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::string, bool> responses_;
};

}  // namespace irteval
