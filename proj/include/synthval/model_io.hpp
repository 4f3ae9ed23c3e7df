#pragma once

#include <string>

#include "synthval/copula.hpp"
#include "synthval/gmm.hpp"

namespace synthval {

// JSON artifacts for fitted generators, reloadable for later sampling.
void save_gmm(const GmmModel& model, const std::string& path);
GmmModel load_gmm(const std::string& path);

void save_copula(const CopulaModel& model, const std::string& path);
CopulaModel load_copula(const std::string& path);

// "gmm" or "copula", from the artifact's type tag.
std::string model_type_of(const std::string& path);

}  // namespace synthval
