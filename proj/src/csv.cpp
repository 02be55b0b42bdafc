#include "insurisk/csv.hpp"

#include <string>

#include "insurisk/config.hpp"

namespace insurisk {

namespace {

class Row {
 public:
  explicit Row(std::ostream& out) : out_(out) {}
  ~Row() { out_ << '\n'; }

  Row& operator<<(double v) { return cell(format_number(v)); }
  Row& operator<<(const std::string& s) { return cell(s); }
  Row& operator<<(const char* s) { return cell(s); }
  Row& count(std::size_t v) { return cell(std::to_string(v)); }
  Row& empty() { return cell(""); }

 private:
  Row& cell(const std::string& s) {
    if (!first_) out_ << ',';
    first_ = false;
    out_ << s;
    return *this;
  }

  std::ostream& out_;
  bool first_ = true;
};

}  // namespace

void write_chain_csv(std::ostream& out, const ChainPath& path) {
  out << "t,state\n";
  for (std::size_t k = 0; k < path.grid.nodes(); ++k) Row(out) << path.grid.time(k) << std::to_string(path.states[k] + 1);
}

void write_market_csv(std::ostream& out, const MarketPath& path) {
  out << "t,bond,stock,claim_count,aggregate_claims,reserve\n";
  for (std::size_t k = 0; k < path.grid.nodes(); ++k)
    Row(out) << path.grid.time(k) << path.bond[k] << path.stock[k] << path.claim_count[k] << path.aggregate_claims[k]
             << path.reserve[k];
}

void write_marks_csv(std::ostream& out, const MarketPath& path) {
  out << "kind,time,size,step\n";
  for (const Mark& m : path.asset_marks) Row(out) << "asset" << m.time << m.size << std::to_string(m.step);
  for (const Mark& m : path.claim_marks) Row(out) << "claim" << m.time << m.size << std::to_string(m.step);
}

void write_surplus_csv(std::ostream& out, const SurplusPath& path) {
  out << "t,x,y,ybar,u,pi,flow,dW1\n";
  const std::size_t n = path.grid.steps;
  for (std::size_t k = 0; k <= n; ++k) {
    Row row(out);
    row << path.grid.time(k) << path.x[k] << path.y[k] << path.ybar[k] << path.u[k];
    if (k < n) row << path.pi[k] << path.flow[k] << path.dW1[k];
    else row.empty().empty().empty();
  }
}

void write_filter_csv(std::ostream& out, const FilterPath& path) {
  const Eigen::Index d = path.states();
  out << "t";
  for (Eigen::Index j = 0; j < d; ++j) out << ",qbar_" << j + 1;
  out << ",log_scale_qbar";
  for (Eigen::Index j = 0; j < d; ++j) out << ",lambda_" << j + 1;
  out << '\n';
  for (std::size_t k = 0; k < path.grid.nodes(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    Row row(out);
    row << path.grid.time(k);
    for (Eigen::Index j = 0; j < d; ++j) row << path.qbar(j, c);
    row << path.log_scale_qbar[k];
    for (Eigen::Index j = 0; j < d; ++j) row << path.lambda_hat(j, c);
  }
}

void write_risk_csv(std::ostream& out, const RiskReport& report,
                    const std::vector<std::optional<ScenarioControl>>& controls) {
  out << "label,theta0,theta1,theta2_slope,loss,loss_se,penalty,penalty_se,value,value_se,mean_g,mean_g_se,selected\n";
  for (std::size_t s = 0; s < report.rows.size(); ++s) {
    const ScenarioRiskRow& r = report.rows[s];
    Row row(out);
    row << r.label;
    if (s < controls.size() && controls[s]) row << controls[s]->theta0 << controls[s]->theta1 << controls[s]->theta2_slope;
    else row.empty().empty().empty();
    row << r.loss.value << r.loss.se << r.penalty.value << r.penalty.se << r.value.value << r.value.se << r.mean_g.value
        << r.mean_g.se << (s == report.argmax ? "1" : "0");
  }
}

void write_saddle_csv(std::ostream& out, const SaddleReport& r) {
  out << "field,value\n";
  const auto put = [&](const char* name, double v) { Row(out) << name << v; };
  const auto flag = [&](const char* name, bool v) { Row(out) << name << (v ? "1" : "0"); };
  put("inf_sup", r.inf_sup);
  put("sup_inf", r.sup_inf);
  put("gap", r.gap);
  put("resolution_bound", r.resolution_bound);
  put("pi_closed", r.closed_form.pi);
  put("theta0_closed", r.closed_form.theta0);
  put("theta1_closed", r.closed_form.theta1);
  put("slope_closed", r.closed_form.slope);
  put("pi_argmin", r.inf_sup_point.pi);
  put("theta0_argmax", r.inf_sup_point.theta0);
  put("theta1_argmax", r.inf_sup_point.theta1);
  put("slope_argmax", r.inf_sup_point.slope);
  put("pi_sup_inf", r.sup_inf_point.pi);
  put("theta0_sup_inf", r.sup_inf_point.theta0);
  put("theta1_sup_inf", r.sup_inf_point.theta1);
  put("slope_sup_inf", r.sup_inf_point.slope);
  put("fd_pi", r.fd_residual[0]);
  put("fd_theta0", r.fd_residual[1]);
  put("fd_theta1", r.fd_residual[2]);
  put("fd_slope", r.fd_residual[3]);
  flag("closed_form_inside", r.closed_form_inside);
  flag("gap_ok", r.gap_ok);
  flag("argmin_ok", r.argmin_ok);
  flag("argmax_ok", r.argmax_ok);
  flag("fd_ok", r.fd_ok);
  flag("passed", r.passed());
}

void write_saddle_grid_csv(std::ostream& out, const SaddleReport& r, const ControlBounds& bounds) {
  out << "pi,sup_theta_h\n";
  const std::size_t n = r.sup_profile.size();
  const double h = n > 1 ? (bounds.pi.hi - bounds.pi.lo) / static_cast<double>(n - 1) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = i + 1 == n ? bounds.pi.hi : bounds.pi.lo + h * static_cast<double>(i);
    Row(out) << pi << r.sup_profile[i];
  }
}

}  // namespace insurisk
