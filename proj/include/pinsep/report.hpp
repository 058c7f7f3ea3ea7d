#ifndef PINSEP_REPORT_HPP
#define PINSEP_REPORT_HPP

#include <string>

#include "json.hpp"
#include "pinsep/input.hpp"

namespace pinsep {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

// resolve "X:Y" leg names: C = whole algebra, k/Fp = prime field, else subring
struct LegView {
    std::string lower_name, upper_name;
    Subalgebra lower, upper;
};
LegView resolve_leg(const InputDocument& doc, const std::string& leg);

Json report_envelope(const std::string& command, const InputDocument& doc, Json params, Json results);

Json cmd_classify(const InputDocument& doc, const std::string& leg, bool force, long max_dim);
Json cmd_tower(const InputDocument& doc);
Json cmd_jb(const InputDocument& doc, long max_dim);
Json cmd_diff(const InputDocument& doc, const std::string& leg, int order, const std::string& op, bool force);

std::string render_text(const Json& report);

} // namespace pinsep

#endif
