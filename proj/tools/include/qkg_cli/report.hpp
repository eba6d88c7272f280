#pragma once

#include <qkg/approx.hpp>
#include <qkg/constants.hpp>
#include <qkg/exponents.hpp>
#include <qkg/flow.hpp>
#include <qkg/goodness.hpp>

#include <json.hpp>

namespace qkg::cli {

using json = nlohmann::json;

json to_json(const ExponentEstimate& e);
json to_json(const ExponentConditionReport& r);
json to_json(const ConstantsReport& r);
json to_json(const GoodCheckReport& r);
json to_json(const Km1Report& r);
json to_json(const Km2Report& r);
json to_json(const NondivReport& r);
json to_json(const ATildeMeasurement& m);
json to_json(const LargeReport& r);
json to_json(const BadSetReport& r);
json to_json(const SeriesBracket& b);
json to_json(const FlowParameters& p);
json to_json(const MainTheoremReport& r);

const char* to_string(GradientClass c);

}  // namespace qkg::cli
