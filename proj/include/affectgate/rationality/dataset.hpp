#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "affectgate/game/choice.hpp"

namespace affectgate::rationality {

// Immutable, nonempty sequence of choice events with the per-gate expected
// utilities G_rj precomputed. Copies and prefixes share storage.
class ChoiceDataset {
 public:
  // Validates every event. Throws DataError if empty or invalid.
  explicit ChoiceDataset(std::vector<game::ChoiceEvent> events);

  std::size_t size() const noexcept { return size_; }
  std::span<const game::ChoiceEvent> events() const noexcept {
    return {storage_->events.data(), size_};
  }
  const game::ChoiceEvent& event(std::size_t r) const { return storage_->events.at(r); }
  std::span<const double> utilities(std::size_t r) const { return storage_->utilities.at(r); }
  std::size_t chosen(std::size_t r) const { return storage_->events.at(r).chosen_gate; }

  // Events [0, k). Requires 1 <= k <= size().
  ChoiceDataset head(std::size_t k) const;

  // Throws DataError if no event satisfies `keep`.
  ChoiceDataset filter(const std::function<bool(const game::ChoiceEvent&)>& keep) const;

 private:
  struct Storage {
    std::vector<game::ChoiceEvent> events;
    std::vector<std::vector<double>> utilities;
  };
  ChoiceDataset(std::shared_ptr<const Storage> storage, std::size_t size)
      : storage_(std::move(storage)), size_(size) {}

  std::shared_ptr<const Storage> storage_;
  std::size_t size_;
};

}  // namespace affectgate::rationality
