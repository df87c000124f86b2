#pragma once

#include <string>

#include "dcw/choice_model.hpp"
#include "dcw/estimation.hpp"

namespace dcw {

/// JSON serialization of models and fits. Schemas are versioned
/// ("dcw-model/1", "dcw-fit/1", "dcw-draws/1"); documents round-trip
/// deterministically (sorted keys, shortest-round-trip numbers).
std::string model_to_json(const ChoiceModel& model);
ChoiceModel model_from_json(const std::string& text);

ChoiceModel load_model(const std::string& path);
void save_model(const ChoiceModel& model, const std::string& path);

std::string fit_to_json(const DemandFit& fit);
DemandFit fit_from_json(const std::string& text);

DemandFit load_fit(const std::string& path);
void save_fit(const DemandFit& fit, const std::string& path);

std::string draws_to_json(const PosteriorDraws& draws);
PosteriorDraws draws_from_json(const std::string& text);

PosteriorDraws load_draws(const std::string& path);
void save_draws(const PosteriorDraws& draws, const std::string& path);

}  // namespace dcw
