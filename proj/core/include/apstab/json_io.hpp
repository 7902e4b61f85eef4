#pragma once

#include <string>

#include "apstab/certificate.hpp"
#include "apstab/model.hpp"

namespace apstab {

/// Parse a model description. Errors throw std::invalid_argument naming the
/// offending field (e.g. "kernels[0][1].densities[0].lambda: must be > 0").
NetworkModel parse_model_text(const std::string& text, const std::string& name);

/// Load a model description from disk; the file stem becomes the model name.
NetworkModel load_model(const std::string& path);

/// Serialize a model back to the on-disk schema (round-trips through
/// parse_model_text up to floating-point formatting).
std::string model_to_text(const NetworkModel& model);
void save_model(const NetworkModel& model, const std::string& path);

/// Certificate serialization used by the command-line tools and tests.
std::string certificate_to_text(const StabilityCertificate& cert);
StabilityCertificate certificate_from_text(const std::string& text);

}  // namespace apstab
