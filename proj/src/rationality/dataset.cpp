#include "affectgate/rationality/dataset.hpp"

#include <stdexcept>
#include <string>

#include "affectgate/core/error.hpp"

namespace affectgate::rationality {

ChoiceDataset::ChoiceDataset(std::vector<game::ChoiceEvent> events) : size_(events.size()) {
  if (events.empty()) throw DataError("empty choice dataset");
  auto storage = std::make_shared<Storage>();
  storage->utilities.reserve(events.size());
  for (const auto& e : events) {
    e.validate();
    storage->utilities.push_back(game::round_utilities(e.round));
  }
  storage->events = std::move(events);
  storage_ = std::move(storage);
}

ChoiceDataset ChoiceDataset::head(std::size_t k) const {
  if (k == 0 || k > size_)
    throw std::out_of_range("prefix length " + std::to_string(k) + " outside [1, " +
                            std::to_string(size_) + "]");
  return ChoiceDataset(storage_, k);
}

ChoiceDataset ChoiceDataset::filter(
    const std::function<bool(const game::ChoiceEvent&)>& keep) const {
  std::vector<game::ChoiceEvent> kept;
  for (const auto& e : events())
    if (keep(e)) kept.push_back(e);
  return ChoiceDataset(std::move(kept));
}

}  // namespace affectgate::rationality
