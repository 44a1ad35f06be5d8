#pragma once

#include <iosfwd>
#include <string>

#include "sentinel/campaign.hpp"
#include "sentinel/design.hpp"
#include "sentinel/estimators.hpp"

namespace sentinel {

std::string design_to_json(const SamplingDesign& design);
SamplingDesign design_from_json(const std::string& text);

/// {method, point, variance, ci: [lo, hi], alpha, n, realized_cost,
///  design_digest}
std::string estimate_report_json(const MeanEstimate& estimate,
                                 double realized_cost,
                                 const std::string& design_digest);

std::string experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

std::string campaign_report_to_json(const CampaignReport& report);

void write_widths_csv(const CampaignReport& report, std::ostream& out);
void write_coverage_csv(const CampaignReport& report, std::ostream& out);
void write_budget_saved_csv(const CampaignReport& report, std::ostream& out);

/// Outcome list round-trip for the CLI:
/// id,sampled,regular,label,bonus_paid,base_paid,effort
void write_outcomes_csv(const std::vector<LabelOutcome>& outcomes,
                        std::ostream& out);
std::vector<LabelOutcome> read_outcomes_csv(std::istream& in);

}  // namespace sentinel
