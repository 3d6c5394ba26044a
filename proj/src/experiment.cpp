#include "dualcert/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dualcert/constants.hpp"

namespace dualcert {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

const char* method_name(MethodId id) {
  switch (id) {
    case MethodId::ProjectedGradient: return "pg";
    case MethodId::Fista: return "fista";
    case MethodId::Tseng: return "tseng";
  }
  return "?";
}

MethodId method_from_name(const std::string& name) {
  if (name == "pg") return MethodId::ProjectedGradient;
  if (name == "fista") return MethodId::Fista;
  if (name == "tseng") return MethodId::Tseng;
  throw ConfigError("unknown method: " + name);
}

std::string trace_to_csv(const RunTrace& trace, const ReferenceSolution* ref) {
  std::ostringstream out;
  out << "k,d,f_xbar,delta_xbar,f_xtilde,delta_xtilde,f_xhat,delta_xhat,"
         "dist_u_to_ref,wall_ns\n";
  for (const auto& pt : trace.points) {
    const double dist =
        ref ? (pt.u - ref->u_star).norm()
            : std::numeric_limits<double>::quiet_NaN();
    out << pt.k << ',' << fmt(pt.dual_value) << ',' << fmt(pt.f_xbar) << ','
        << fmt(pt.delta_xbar) << ',' << fmt(pt.f_xtilde) << ','
        << fmt(pt.delta_xtilde) << ',' << fmt(pt.f_xhat) << ','
        << fmt(pt.delta_xhat) << ',' << fmt(dist) << ',' << pt.wall_ns << '\n';
  }
  return out.str();
}

std::string report_to_json(const CertificateReport& report) {
  Json j;
  j["method"] = report.method;
  Json families = Json::object();
  for (const auto& s : report.series) {
    Json f;
    f["provenance"] = provenance_name(s.provenance);
    f["k"] = s.k;
    f["measured"] = s.measured;
    f["bound"] = s.bound;
    f["margin"] = s.margin;
    f["violated"] = s.violated;
    families[s.family] = std::move(f);
  }
  j["families"] = std::move(families);
  return j.dump(2) + "\n";
}

CertificateReport report_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(std::string("report parse error: ") + e.what());
  }
  CertificateReport report;
  report.method = j.at("method").get<std::string>();
  for (const auto& [family, f] : j.at("families").items()) {
    BoundSeries s;
    s.family = family;
    s.provenance = f.at("provenance").get<std::string>() == "exact"
                       ? ConstantProvenance::Exact
                       : ConstantProvenance::Surrogate;
    s.k = f.at("k").get<std::vector<int>>();
    s.measured = f.at("measured").get<std::vector<double>>();
    s.bound = f.at("bound").get<std::vector<double>>();
    s.margin = f.at("margin").get<std::vector<double>>();
    s.violated = f.at("violated").get<std::vector<bool>>();
    const size_t len = s.k.size();
    if (s.measured.size() != len || s.bound.size() != len ||
        s.margin.size() != len || s.violated.size() != len) {
      throw InputError("report family " + family + ": ragged arrays");
    }
    report.series.push_back(std::move(s));
  }
  return report;
}

std::vector<int> log_spaced_iterations(int last) {
  std::vector<int> ks;
  for (long base = 1; base <= last; base *= 10) {
    for (long mult : {1L, 2L, 5L}) {
      const long k = base * mult;
      if (k <= last) ks.push_back(static_cast<int>(k));
    }
  }
  if (ks.empty() || ks.back() != last) ks.push_back(last);
  return ks;
}

std::string summary_to_csv(const RunTrace& trace,
                           const ReferenceSolution& ref) {
  std::ostringstream out;
  out << "k,dual_gap,f_xbar_err,f_xtilde_err,f_xhat_err,delta_xbar\n";
  for (int k : log_spaced_iterations(trace.last_k())) {
    const auto& pt = trace.at(k);
    out << k << ',' << fmt(ref.d_star - pt.dual_value) << ','
        << fmt(std::abs(pt.f_xbar - ref.f_star)) << ','
        << fmt(std::abs(pt.f_xtilde - ref.f_star)) << ','
        << fmt(std::abs(pt.f_xhat - ref.f_star)) << ','
        << fmt(pt.delta_xbar) << '\n';
  }
  return out.str();
}

namespace {

struct MethodOutput {
  std::string name;
  RunTrace trace;
  CertificateReport report;
};

MethodOutput run_one(const ProblemInstance& inst, const ReferenceSolution& ref,
                     const ExperimentConfig& cfg, MethodId id) {
  MethodOutput out;
  out.name = method_name(id);
  MethodOptions opts;
  opts.oracle = cfg.oracle;

  DualPoint u0 = DualPoint::zero(inst);
  CertificateContext ctx =
      make_certificate_context(inst, ref, cfg.certificate_tolerance);

  switch (id) {
    case MethodId::ProjectedGradient: {
      out.trace =
          projected_dual_gradient(inst, u0, cfg.pg_rule, cfg.iterations, opts);
      pg_envelope_constants(inst, ctx, out.trace);
      out.report = pointwise_bounds_report(ctx, inst, out.trace);
      CertificateReport env = pg_rate_envelopes(ctx, inst, out.trace);
      for (auto& s : env.series) out.report.series.push_back(std::move(s));
      break;
    }
    case MethodId::Fista: {
      out.trace = fista_dual(inst, u0, cfg.iterations, opts);
      out.report = pointwise_bounds_report(ctx, inst, out.trace);
      CertificateReport env =
          fg_rate_envelopes(ctx, inst, out.trace, FastGradientVariant::Fista);
      for (auto& s : env.series) out.report.series.push_back(std::move(s));
      break;
    }
    case MethodId::Tseng: {
      const double l_tilde = dual_gradient_lipschitz_bound(inst);
      out.trace =
          tseng_fast_gradient(inst, u0, u0, l_tilde, cfg.iterations, opts);
      out.report = pointwise_bounds_report(ctx, inst, out.trace);
      CertificateReport env =
          fg_rate_envelopes(ctx, inst, out.trace, FastGradientVariant::Tseng);
      for (auto& s : env.series) out.report.series.push_back(std::move(s));
      break;
    }
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ProblemInstance& inst,
                                const ReferenceSolution& ref,
                                const ExperimentConfig& cfg,
                                const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);

  std::vector<std::future<MethodOutput>> futures;
  futures.reserve(cfg.methods.size());
  for (MethodId id : cfg.methods) {
    futures.push_back(std::async(std::launch::async, run_one, std::cref(inst),
                                 std::cref(ref), std::cref(cfg), id));
  }

  ExperimentResult result;
  for (auto& fut : futures) {
    MethodOutput out = fut.get();
    const std::string base = output_dir + "/" + out.name;
    write_file(base + "_trace.csv", trace_to_csv(out.trace, &ref));
    write_file(base + "_certificates.json", report_to_json(out.report));
    write_file(base + "_summary.csv", summary_to_csv(out.trace, ref));
    result.files_written.push_back(base + "_trace.csv");
    result.files_written.push_back(base + "_certificates.json");
    result.files_written.push_back(base + "_summary.csv");
    result.total_violations += out.report.total_violations();
  }
  return result;
}

VerifyResult verify_report(const std::string& report_dir) {
  VerifyResult result;
  std::ostringstream out;
  std::vector<std::string> report_files;
  std::error_code ec;
  for (const auto& entry :
       std::filesystem::directory_iterator(report_dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 18 &&
        name.substr(name.size() - 18) == "_certificates.json") {
      report_files.push_back(entry.path().string());
    }
  }
  if (ec) {
    result.exit_code = 2;
    result.summary = "cannot read directory " + report_dir + ": " + ec.message();
    return result;
  }
  if (report_files.empty()) {
    result.exit_code = 2;
    result.summary = "no certificate reports found in " + report_dir;
    return result;
  }
  std::sort(report_files.begin(), report_files.end());

  int violations = 0;
  for (const auto& path : report_files) {
    CertificateReport report;
    try {
      report = report_from_json(read_file(path));
    } catch (const std::exception& e) {
      result.exit_code = 2;
      result.summary = std::string("malformed report ") + path + ": " + e.what();
      return result;
    }
    for (const auto& s : report.series) {
      int family_violations = s.violations();
      // Internal consistency: the stored margin must match the stored
      // measured/bound pair in magnitude.
      for (size_t i = 0; i < s.k.size(); ++i) {
        const double expect = std::abs(s.bound[i] - s.measured[i]);
        if (std::abs(std::abs(s.margin[i]) - expect) >
            1e-9 * (1.0 + std::abs(s.bound[i]) + std::abs(s.measured[i]))) {
          result.exit_code = 2;
          result.summary = "inconsistent margin in " + path + " family " +
                           s.family + " at k=" + std::to_string(s.k[i]);
          return result;
        }
      }
      violations += family_violations;
      out << report.method << '/' << s.family << ": worst margin "
          << fmt(s.worst_margin());
      if (family_violations > 0) {
        out << "  VIOLATED (" << family_violations << " points)";
      }
      out << '\n';
    }
  }
  result.exit_code = violations > 0 ? 1 : 0;
  result.summary = out.str();
  return result;
}

}  // namespace dualcert
