#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "insurisk/chain.hpp"
#include "insurisk/filter.hpp"
#include "insurisk/game.hpp"
#include "insurisk/market.hpp"
#include "insurisk/risk.hpp"
#include "insurisk/surplus.hpp"

namespace insurisk {

// Header row, fixed column order, '.' decimal point, shortest round-trip
// numbers, '\n' line ends.

/// t,state (state numbered from 1)
void write_chain_csv(std::ostream& out, const ChainPath& path);
/// t,bond,stock,claim_count,aggregate_claims,reserve
void write_market_csv(std::ostream& out, const MarketPath& path);
/// kind,time,size,step
void write_marks_csv(std::ostream& out, const MarketPath& path);
/// t,x,y,ybar,u,pi,flow,dW1 (step columns empty on the last node)
void write_surplus_csv(std::ostream& out, const SurplusPath& path);
/// t,qbar_1..qbar_D,log_scale_qbar,lambda_1..lambda_D
void write_filter_csv(std::ostream& out, const FilterPath& path);
/// label,theta0,theta1,theta2_slope,loss,loss_se,penalty,penalty_se,value,value_se,mean_g,mean_g_se,selected
/// (theta columns empty for state-dependent scenarios)
void write_risk_csv(std::ostream& out, const RiskReport& report,
                    const std::vector<std::optional<ScenarioControl>>& controls);
/// field,value
void write_saddle_csv(std::ostream& out, const SaddleReport& report);
/// pi,sup_theta_h
void write_saddle_grid_csv(std::ostream& out, const SaddleReport& report, const ControlBounds& bounds);

}  // namespace insurisk
