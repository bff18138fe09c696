// quadembed command-line front end.
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quadembed/error.hpp"
#include "quadembed/flow.hpp"
#include "quadembed/io.hpp"
#include "quadembed/lattice_fourier.hpp"
#include "quadembed/lift_structure.hpp"
#include "quadembed/nhim.hpp"
#include "quadembed/quadratic_tensor.hpp"
#include "quadembed/sphere_harmonics.hpp"

namespace fs = std::filesystem;
using namespace quadembed;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string out_dir = ".";
  std::string report;
  std::uint64_t seed = 1;
  double rtol = 1e-10;
  double atol = 1e-10;
};

struct SourceOptions {
  std::string abc;
  std::string torus_field;
  std::string sphere_field;
  std::string tensor;
  bool rotation = false;
  int degree = -1;
  bool drop_constant = false;
  std::string x0;
};

struct Options {
  Common common;
  SourceOptions source;
  double T = 20.0;
  int grid = 1001;
  double max_error = -1.0;
  double tol = 1e-12;
  // embed-torus
  bool keep_zero = false;
  std::string tensor_out = "tensor.json";
  // embed-sphere
  std::string billiard;
  std::string part = "re";
  // lyapunov
  double interval = 1.0;
  double transient = 0.2;
  int scan = 0;
  double scan_horizon = 200.0;
  bool embedded = false;
  // poincare
  std::string normal = "0,0,1";
  double offset = 0.0;
  bool periodic = false;
  int direction = 1;
  // nhim-demo
  double contraction = 5.0;
  std::string deltas = "0.001,0.005,0.01";
  double t_settle = 200.0;
  int project_degree = 2;
  // dims
  int n = 3;
  double epsilon = 0.0;
  int k = 2;
  int m = 1;
  double jackson_constant = 1.0;
  double norm = 1.0;
  // lift-check
  int d = 4;
  int max_length = 4;
  int fd_length = 3;
  int closure_d = 8;
  int K = 5;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, std::string("cannot parse ") + what + " '" + text + "'");
    }
  }
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void print_error(const std::string& code, const std::string& message, const std::string& command) {
  Json rec;
  rec["error"] = code;
  rec["message"] = message;
  rec["command"] = command;
  std::cerr << rec.dump() << '\n';
}

class Runner {
 public:
  Runner(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {
    fs::create_directories(opt_.common.out_dir);
  }

  fs::path path(const std::string& name) const {
    const fs::path p(name);
    return p.is_absolute() ? p : fs::path(opt_.common.out_dir) / p;
  }

  Json report_header() const {
    Json r;
    r["provenance"] = provenance_json({command_, opt_.common.seed, opt_.common.rtol, opt_.common.atol});
    return r;
  }

  void finish(const Json& report) const {
    const std::string name = opt_.common.report.empty() ? command_ + ".json" : opt_.common.report;
    write_json(path(name), report);
    std::cout << "report: " << path(name).string() << '\n';
  }

  IntegratorOptions integrator() const {
    if (!(opt_.common.rtol > 0.0) || !(opt_.common.atol > 0.0))
      throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
    return {opt_.common.rtol, opt_.common.atol};
  }

  // Resolves the field options into a manifold field (torus or sphere).
  struct Source {
    std::optional<TorusField> torus;
    std::optional<PolyField> sphere;
    std::string label;
  };

  Source source() const {
    const auto& s = opt_.source;
    const int given = !s.abc.empty() + !s.torus_field.empty() + !s.sphere_field.empty() + s.rotation;
    if (given != 1) throw Error(ErrorCode::InvalidArgument, "give exactly one of --abc, --torus-field, --sphere-field, --rotation");
    Source out;
    if (!s.abc.empty()) {
      const auto p = parse_list(s.abc, "--abc");
      if (p.size() != 3) throw Error(ErrorCode::InvalidArgument, "--abc needs A,B,C");
      out.torus = abc_field(p[0], p[1], p[2]);
      out.label = "abc";
    } else if (!s.torus_field.empty()) {
      out.torus = torus_field_from_json(read_json(s.torus_field));
      out.label = s.torus_field;
    } else if (!s.sphere_field.empty()) {
      out.sphere = poly_field_from_json(read_json(s.sphere_field));
      out.label = s.sphere_field;
    } else {
      out.sphere = equator_rotation_field();
      out.label = "rotation";
    }
    return out;
  }

  Eigen::VectorXd initial_condition(const Source& src) const {
    if (!opt_.source.x0.empty()) return to_vector(parse_list(opt_.source.x0, "--x0"));
    if (src.torus) return default_torus_x0(src.torus->dimension());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(src.sphere->size()));
    x[0] = 0.6;
    x[x.size() - 1] = 0.8;
    return x;
  }

  static Eigen::VectorXd default_torus_x0(int n) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = 0.1 * (i + 1);
    return x;
  }

  int sphere_degree(const PolyField& f) const {
    return opt_.source.degree >= 0 ? opt_.source.degree : std::max(1, field_degree(f) - 1);
  }

  const std::string& command() const { return command_; }

 private:
  std::string command_;
  const Options& opt_;
};

Json tensor_summary(const QuadraticTensor& t) {
  Json r;
  const auto anti = check_antisymmetry(t);
  const auto tao = check_tao_condition(symmetrize(t));
  const Eigen::VectorXd div = tensor_divergence(t);
  r["dimension"] = t.dimension();
  r["nonzeros"] = t.nonzeros();
  r["certified"] = t.certified();
  r["frobenius_norm"] = t.frobenius_norm();
  r["antisymmetry_violation"] = anti.max_violation;
  r["tao_symbolic_residual"] = tao.symbolic_residual;
  r["tao_sampled_residual"] = tao.sampled_residual;
  r["divergence_max"] = div.size() ? div.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

int run_embed_torus(const Options& opt) {
  Runner run("embed-torus", opt);
  auto src = run.source();
  if (!src.torus) throw Error(ErrorCode::InvalidArgument, "embed-torus needs a torus field");
  validate_torus_field(*src.torus);
  LatticeSet lattice = opt.keep_zero ? enumerate_lattice(src.torus->dimension(), src.torus->cutoff(), false)
                                     : field_lattice(*src.torus);
  const QuadraticTensor tensor = build_torus_tensor(*src.torus, lattice);
  const auto div = torus_divergence_check(*src.torus);

  Json report = run.report_header();
  report["field"] = src.label;
  report["lattice"] = {{"n", lattice.n},
                       {"cutoff", lattice.cutoff},
                       {"representatives", lattice.representatives.size()},
                       {"includes_zero", lattice.includes_zero},
                       {"full_count", lattice.full_count},
                       {"embedding_dimension", lattice.embedding_dimension()},
                       {"unreduced_embedding_dimension", lattice.unreduced_embedding_dimension()}};
  report["tensor"] = tensor_summary(tensor);
  report["field_divergence_free"] = div.field_divergence_free;
  report["max_field_contraction"] = div.max_field_contraction;
  write_json(run.path(opt.tensor_out), tensor_to_json(tensor));
  report["tensor_file"] = run.path(opt.tensor_out).string();
  std::cout << "d = " << tensor.dimension() << " (unreduced " << lattice.unreduced_embedding_dimension() << ")\n";
  run.finish(report);
  return kExitOk;
}

int run_embed_sphere(const Options& opt) {
  Runner run("embed-sphere", opt);
  PolyField field;
  std::string label;
  if (!opt.billiard.empty()) {
    const auto l = parse_list(opt.billiard, "--billiard");
    if (l.size() != 3) throw Error(ErrorCode::InvalidArgument, "--billiard needs three angles");
    const auto b = billiard_field(l[0], l[1], l[2]);
    if (opt.part != "re" && opt.part != "im") throw Error(ErrorCode::InvalidArgument, "--part must be re or im");
    field = opt.part == "re" ? b.real_part : b.imaginary_part;
    label = "billiard-" + opt.part;
  } else {
    auto src = run.source();
    if (!src.sphere) throw Error(ErrorCode::InvalidArgument, "embed-sphere needs a sphere field");
    field = *src.sphere;
    label = src.label;
  }
  const int N = run.sphere_degree(field);
  SphereEmbedding emb(field, N, opt.source.drop_constant);
  const auto div = sphere_divergence_check(emb.decomposition.field, emb.theta);

  Json report = run.report_header();
  report["field"] = label;
  report["n"] = emb.basis->n();
  report["max_degree"] = N;
  report["basis_size"] = emb.basis->size();
  report["harmonic_dimension"] = harmonic_dimension(emb.basis->n(), N, DimensionMode::Cumulative).value;
  report["basis_hash"] = basis_to_json(*emb.basis)["hash"];
  report["drop_constant"] = emb.drop_constant;
  report["decomposition"] = {{"system_residual", emb.decomposition.system_residual},
                             {"reconstruction_residual", emb.decomposition.reconstruction_residual},
                             {"tangency_residual", emb.decomposition.tangency_residual}};
  report["theta"] = {{"raw_antisymmetry_violation", emb.theta.raw_antisymmetry_violation},
                     {"raw_cross_degree_max", emb.theta.raw_cross_degree_max},
                     {"expansion_residual", emb.theta.expansion_residual}};
  report["divergence"] = {{"field_divergence_free", div.field_divergence_free},
                          {"max_contraction", div.max_contraction},
                          {"max_tensor_divergence", div.max_tensor_divergence}};
  report["tensor"] = tensor_summary(emb.tensor);
  write_json(run.path(opt.tensor_out), tensor_to_json(emb.tensor));
  write_json(run.path("basis.json"), basis_to_json(*emb.basis));
  write_json(run.path("coefficients.json"), sphere_field_to_json(emb.decomposition.field));
  report["tensor_file"] = run.path(opt.tensor_out).string();
  std::cout << "d = " << emb.tensor.dimension() << '\n';
  run.finish(report);
  return kExitOk;
}

int run_verify(const Options& opt) {
  Runner run("verify", opt);
  if (opt.source.tensor.empty()) throw Error(ErrorCode::InvalidArgument, "verify needs --tensor");
  const QuadraticTensor tensor = tensor_from_json(read_json(opt.source.tensor));
  const auto anti = check_antisymmetry(tensor, opt.tol);
  const auto tao = check_tao_condition(symmetrize(tensor), 1000, opt.common.seed);
  const Eigen::VectorXd div = tensor_divergence(tensor);

  Json report = run.report_header();
  report["tensor_file"] = opt.source.tensor;
  report["tolerance"] = opt.tol;
  report["tensor"] = tensor_summary(tensor);
  Json viol = Json::array();
  for (const auto& v : anti.violations)
    viol.push_back({{"i", v.i}, {"j", v.j}, {"k", v.k}, {"value", v.value}, {"partner", v.partner},
                    {"violation", v.violation()}});
  report["violations"] = viol;
  const bool pass = anti.max_violation <= opt.tol && tao.symbolic_residual <= opt.tol;
  report["pass"] = pass;
  std::cout << "antisymmetry violation " << format_number(anti.max_violation) << '\n';
  std::cout << "tao residual " << format_number(tao.symbolic_residual) << '\n';
  std::cout << "divergence max " << format_number(div.size() ? div.cwiseAbs().maxCoeff() : 0.0) << '\n';
  for (const auto& v : anti.violations)
    std::cout << "violation at (" << v.i << "," << v.j << "," << v.k << "): " << format_number(v.violation()) << '\n';
  run.finish(report);
  if (!pass) {
    std::string where;
    if (!anti.violations.empty()) {
      const auto& v = anti.violations.front();
      where = " at (" + std::to_string(v.i) + "," + std::to_string(v.j) + "," + std::to_string(v.k) + ")";
    }
    print_error("VerificationFailure", "antisymmetry violated" + where, run.command());
    return kExitFailure;
  }
  return kExitOk;
}

int run_integrate(const Options& opt) {
  Runner run("integrate", opt);
  Json report = run.report_header();
  Trajectory traj;
  if (!opt.source.tensor.empty()) {
    const QuadraticTensor tensor = tensor_from_json(read_json(opt.source.tensor));
    if (opt.source.x0.empty()) throw Error(ErrorCode::InvalidArgument, "--x0 is required with --tensor");
    traj = integrate_quadratic(tensor, to_vector(parse_list(opt.source.x0, "--x0")), opt.T, run.integrator());
    report["source"] = "quadratic";
  } else {
    auto src = run.source();
    const Eigen::VectorXd x0 = run.initial_condition(src);
    const FlowSource fs = src.torus ? FlowSource::torus(*src.torus) : FlowSource::sphere(*src.sphere);
    traj = integrate_manifold_field(fs, x0, opt.T, run.integrator());
    report["source"] = fs.kind_name();
    if (src.sphere) report["sphere_drift"] = sphere_drift(traj);
  }
  report["T"] = opt.T;
  report["steps"] = {{"accepted", traj.stats.accepted}, {"rejected", traj.stats.rejected},
                     {"evaluations", traj.stats.evaluations}};
  if (!opt.source.tensor.empty()) {
    report["norm_drift"] = norm_drift(traj);
    std::cout << "norm drift " << format_number(norm_drift(traj)) << '\n';
  } else if (report.contains("sphere_drift")) {
    std::cout << "sphere drift " << format_number(report["sphere_drift"].get<double>()) << '\n';
  }
  report["final_state"] = vector_to_json(traj.states().back());
  write_trajectory_csv(run.path("trajectory.csv"), traj);
  report["trajectory_file"] = run.path("trajectory.csv").string();
  std::cout << "steps " << traj.stats.accepted << '\n';
  run.finish(report);
  return kExitOk;
}

int run_compare(const Options& opt) {
  Runner run("compare", opt);
  auto src = run.source();
  const Eigen::VectorXd x0 = run.initial_condition(src);
  ConjugacyResult res;
  int d = 0;
  if (src.torus) {
    TorusEmbedding emb(*src.torus);
    d = emb.tensor.dimension();
    res = conjugacy_error(emb, x0, opt.T, run.integrator(), opt.grid);
  } else {
    SphereEmbedding emb(*src.sphere, run.sphere_degree(*src.sphere), opt.source.drop_constant);
    d = emb.tensor.dimension();
    res = conjugacy_error(emb, x0, opt.T, run.integrator(), opt.grid);
  }
  Json report = run.report_header();
  report["field"] = src.label;
  report["x0"] = vector_to_json(x0);
  report["T"] = opt.T;
  report["embedding_dimension"] = d;
  report["conjugacy_error"] = res.sup_error;
  report["time_of_max"] = res.time_of_max;
  report["grid_points"] = res.grid_points;
  std::cout << "conjugacy error " << format_number(res.sup_error) << '\n';
  const bool pass = opt.max_error < 0.0 || res.sup_error <= opt.max_error;
  if (opt.max_error >= 0.0) {
    report["max_error"] = opt.max_error;
    report["pass"] = pass;
  }
  run.finish(report);
  if (!pass) {
    print_error("VerificationFailure", "conjugacy error above --max-error", run.command());
    return kExitFailure;
  }
  return kExitOk;
}

Json lyapunov_json(const LyapunovResult& r) {
  return {{"estimate", r.estimate},
          {"variability", r.variability},
          {"last_quarter_range", r.last_quarter_range},
          {"converged", r.converged},
          {"trace_times", r.trace_times},
          {"trace", r.trace}};
}

int run_lyapunov(const Options& opt) {
  Runner run("lyapunov", opt);
  LyapunovOptions lo;
  lo.renormalization_interval = opt.interval;
  lo.transient_fraction = opt.transient;
  lo.seed = opt.common.seed;
  lo.integrator = run.integrator();
  Json report = run.report_header();
  report["T"] = opt.T;
  report["renormalization_interval"] = opt.interval;
  report["transient_fraction"] = opt.transient;

  if (!opt.source.tensor.empty()) {
    const QuadraticTensor tensor = tensor_from_json(read_json(opt.source.tensor));
    if (opt.source.x0.empty()) throw Error(ErrorCode::InvalidArgument, "--x0 is required with --tensor");
    const auto r = lyapunov_max(FlowSource::quadratic(tensor), to_vector(parse_list(opt.source.x0, "--x0")), opt.T, lo);
    report["direct"] = lyapunov_json(r);
    std::cout << "lyapunov " << format_number(r.estimate) << '\n';
    run.finish(report);
    return kExitOk;
  }

  auto src = run.source();
  Eigen::VectorXd x0 = run.initial_condition(src);
  if (opt.scan > 0) {
    if (!src.torus) throw Error(ErrorCode::InvalidArgument, "--scan needs a torus field");
    const auto scan = scan_chaotic_initial_condition(*src.torus, opt.scan, opt.scan_horizon, opt.common.seed, lo);
    x0 = scan.initial_condition;
    report["scan"] = {{"candidates", scan.candidates}, {"horizon", opt.scan_horizon},
                      {"short_estimate", scan.short_estimate}};
  }
  report["x0"] = vector_to_json(x0);
  const FlowSource direct = src.torus ? FlowSource::torus(*src.torus) : FlowSource::sphere(*src.sphere);
  std::mt19937_64 rng(opt.common.seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v0(x0.size());
  for (Eigen::Index i = 0; i < v0.size(); ++i) v0[i] = normal(rng);
  if (src.sphere) v0 -= v0.dot(x0) * x0;
  const auto r = lyapunov_max(direct, x0, opt.T, lo, v0);
  report["direct"] = lyapunov_json(r);
  std::cout << "lyapunov " << format_number(r.estimate) << " (variability " << format_number(r.variability) << ")\n";

  if (opt.embedded) {
    LyapunovResult e;
    if (src.torus) {
      TorusEmbedding emb(*src.torus);
      e = lyapunov_max(FlowSource::quadratic(emb.tensor), emb.psi(x0), opt.T, lo, emb.psi_jacobian(x0) * v0);
    } else {
      SphereEmbedding emb(*src.sphere, run.sphere_degree(*src.sphere), opt.source.drop_constant);
      e = lyapunov_max(FlowSource::quadratic(emb.tensor), emb.psi(x0), opt.T, lo, emb.psi_jacobian(x0) * v0);
    }
    report["embedded"] = lyapunov_json(e);
    const double rel = std::abs(e.estimate - r.estimate) / std::max(std::abs(r.estimate), 1e-300);
    report["relative_difference"] = rel;
    std::cout << "embedded lyapunov " << format_number(e.estimate) << " (relative difference " << format_number(rel)
              << ")\n";
  }
  run.finish(report);
  return kExitOk;
}

int run_poincare(const Options& opt) {
  Runner run("poincare", opt);
  auto src = run.source();
  const Eigen::VectorXd x0 = run.initial_condition(src);
  const FlowSource fs = src.torus ? FlowSource::torus(*src.torus) : FlowSource::sphere(*src.sphere);
  Hyperplane plane;
  plane.normal = to_vector(parse_list(opt.normal, "--normal"));
  plane.offset = opt.offset;
  plane.periodic = opt.periodic || src.torus.has_value();
  plane.direction = opt.direction;
  const auto pts = poincare_section(fs, x0, opt.T, plane, run.integrator());

  std::vector<std::string> header{"t"};
  for (int i = 1; i <= fs.dimension(); ++i) header.push_back("y_" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  std::vector<Eigen::Vector2d> cloud;
  // Section coordinates: the two state components with the smallest |normal|.
  std::vector<int> order(static_cast<size_t>(fs.dimension()));
  for (int i = 0; i < fs.dimension(); ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(plane.normal[a]) < std::abs(plane.normal[b]); });
  for (const auto& p : pts) {
    std::vector<double> r{p.time};
    r.insert(r.end(), p.state.data(), p.state.data() + p.state.size());
    rows.push_back(std::move(r));
    if (fs.dimension() >= 2) cloud.emplace_back(p.state[order[0]], p.state[order[1]]);
  }
  write_rows_csv(run.path("section.csv"), header, rows);
  const auto boxes = box_counting(cloud);
  Json report = run.report_header();
  report["field"] = src.label;
  report["x0"] = vector_to_json(x0);
  report["T"] = opt.T;
  report["crossings"] = pts.size();
  report["box_counts"] = boxes.counts;
  report["box_dimension"] = boxes.dimension;
  report["classification"] = section_class_name(classify_section(boxes));
  report["section_file"] = run.path("section.csv").string();
  std::cout << pts.size() << " crossings, " << section_class_name(classify_section(boxes)) << '\n';
  run.finish(report);
  return kExitOk;
}

int run_nhim_demo(const Options& opt) {
  Runner run("nhim-demo", opt);
  NhimConfig cfg;
  cfg.contraction = opt.contraction;
  cfg.validate();
  const PolyField X = equator_rotation_field();
  const PolyField Z = extend_with_contraction(X, cfg.contraction);
  Json report = run.report_header();
  report["manifold"] = std::string(kEquatorS2);
  report["contraction"] = cfg.contraction;
  report["default_contraction"] = default_contraction(X, cfg.order);
  report["normal_eigenvalue"] = normal_eigenvalue(Z, 0.0);

  const auto proj = polynomial_project([&Z](const Eigen::VectorXd& x) { return evaluate_field(Z, x); },
                                       opt.project_degree);
  report["projection"] = {{"degree", opt.project_degree}, {"rms_residual", proj.rms_residual},
                          {"max_residual", proj.max_residual}};

  CircleLocateOptions co;
  co.integrator = run.integrator();
  const PolyField P = random_tangent_perturbation(2, opt.common.seed);
  Json runs = Json::array();
  std::vector<std::vector<double>> rows;
  std::vector<double> deltas{0.0};
  for (double d : parse_list(opt.deltas, "--deltas")) deltas.push_back(d);
  int failures = 0;
  for (double delta : deltas) {
    PolyField Zp = Z;
    for (int i = 0; i < 3; ++i) Zp[static_cast<size_t>(i)] += delta * P[static_cast<size_t>(i)];
    Json r;
    r["delta"] = delta;
    try {
      const auto c = invariant_circle_locate(Zp, opt.t_settle, co);
      r["hausdorff"] = c.hausdorff;
      r["within_bound"] = delta == 0.0 ? c.hausdorff <= 1e-6 : c.hausdorff <= 10 * delta;
      r["settle_time"] = c.settle_time;
      for (size_t b = 0; b < c.bin_angle.size(); ++b) rows.push_back({delta, c.bin_angle[b], c.bin_height[b]});
      std::cout << "delta " << format_number(delta) << ": hausdorff " << format_number(c.hausdorff) << '\n';
    } catch (const Error& e) {
      r["error"] = std::string(error_code_name(e.code()));
      r["message"] = e.what();
      ++failures;
      std::cout << "delta " << format_number(delta) << ": " << error_code_name(e.code()) << '\n';
    }
    runs.push_back(std::move(r));
  }
  report["runs"] = runs;
  write_rows_csv(run.path("circle.csv"), {"delta", "angle", "height"}, rows);
  report["curve_file"] = run.path("circle.csv").string();
  report["failures"] = failures;
  run.finish(report);
  return kExitOk;
}

int run_dims(const Options& opt) {
  Runner run("dims", opt);
  const auto hd = harmonic_dimension(opt.n, opt.project_degree, DimensionMode::Cumulative);
  Json report = run.report_header();
  report["n"] = opt.n;
  report["degree"] = opt.project_degree;
  report["d"] = hd.value;
  report["closed_form"] = hd.closed_form;
  report["closed_form_sum"] = hd.closed_form_sum;
  report["closed_form_matches"] = hd.closed_form_matches;
  report["so_torus_dimension"] = so_torus_dimension(hd.value);
  std::cout << "d = " << hd.value << '\n';
  std::cout << "dim SO(" << hd.value << ") x T^" << hd.value << " = " << so_torus_dimension(hd.value) << '\n';
  if (!hd.closed_form_matches)
    std::cout << "closed form evaluates to " << format_number(hd.closed_form) << " (direct count used)\n";
  if (opt.epsilon > 0.0) {
    ApproxParams p{opt.epsilon, opt.m, opt.k, opt.jackson_constant};
    const auto b = manifold_dim_bound(p, opt.n, opt.norm);
    report["jackson"] = {{"epsilon", p.epsilon}, {"k", p.k},           {"m", p.m},
                         {"jackson_constant", p.jackson_constant},    {"norm", opt.norm},
                         {"degree_bound", b.degree},                  {"dimension_bound", b.bound},
                         {"vacuous", b.vacuous},                      {"harmonic_dimension", b.harmonic_dimension},
                         {"so_torus_dimension", b.so_torus_dimension}};
    std::cout << "jackson degree " << b.degree << ", dimension bound " << format_number(b.bound)
              << (b.vacuous ? " (vacuous)" : "") << '\n';
  }
  run.finish(report);
  return kExitOk;
}

void enumerate_words(int m, int length, std::vector<int>& word, const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(word.size()) == length) {
    f(word);
    return;
  }
  for (int a = 0; a < m; ++a) {
    word.push_back(a);
    enumerate_words(m, length, word, f);
    word.pop_back();
  }
}

int run_lift_check(const Options& opt) {
  Runner run("lift-check", opt);
  if (opt.d < 2) throw Error(ErrorCode::InvalidArgument, "--d must be at least 2");
  const int d = opt.d, m = d * (d - 1) / 2;
  Json report = run.report_header();
  report["d"] = d;

  long words = 0, sparse_fail = 0;
  std::vector<int> w;
  for (int L = 1; L <= opt.max_length; ++L)
    enumerate_words(m, L, w, [&](const std::vector<int>& word) {
      ++words;
      if (!product_sparsity_check(d, word).holds) ++sparse_fail;
    });
  report["sparsity"] = {{"max_length", opt.max_length}, {"words", words}, {"failures", sparse_fail}};

  long pairs = 0;
  for (int dd = 2; dd <= opt.closure_d; ++dd) pairs += commutator_closure(dd);
  report["commutator_closure"] = {{"max_d", opt.closure_d}, {"pairs", pairs}};

  const Eigen::MatrixXd Q = random_rotation(d, opt.common.seed);
  double worst = 0.0;
  long fd_words = 0;
  for (int L = 0; L <= opt.fd_length; ++L)
    enumerate_words(m, L, w, [&](const std::vector<int>& word) {
      ++fd_words;
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu)
          worst = std::max(worst, std::abs(f_derivative(mu, nu, Q, word) - f_derivative_fd(mu, nu, Q, word)));
    });
  report["f_derivative"] = {{"max_length", opt.fd_length}, {"words", fd_words}, {"max_difference", worst}};

  const auto bound = iterated_commutator_bound(random_antisymmetric(d, opt.common.seed), opt.K);
  report["iterated_commutator"] = {{"K", opt.K},
                                   {"max_norm_by_length", bound.max_norm_by_length},
                                   {"observed_constant", bound.observed_constant},
                                   {"exhaustive", bound.exhaustive}};
  const bool pass = sparse_fail == 0 && worst <= 1e-6;
  report["pass"] = pass;
  std::cout << "sparsity " << words << " words, " << sparse_fail << " failures\n";
  std::cout << "commutator pairs " << pairs << " closed\n";
  std::cout << "f_derivative max difference " << format_number(worst) << '\n';
  run.finish(report);
  if (!pass) {
    print_error("VerificationFailure", "lift structure check failed", run.command());
    return kExitFailure;
  }
  return kExitOk;
}

// Turns a JSON config object into command-line arguments placed before the
// user's own, so explicit flags win.
std::vector<std::string> config_arguments(const Json& cfg) {
  std::vector<std::string> out;
  if (!cfg.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      out.push_back(flag);
      out.push_back(joined);
    } else {
      out.push_back(flag);
      out.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return out;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.common.out_dir, "Output directory");
  sub->add_option("--report", o.common.report, "Report file name (default <command>.json)");
  sub->add_option("--seed", o.common.seed, "Random seed");
  sub->add_option("--rtol", o.common.rtol, "Relative integration tolerance");
  sub->add_option("--atol", o.common.atol, "Absolute integration tolerance");
}

void add_source(CLI::App* sub, Options& o, bool with_tensor) {
  sub->add_option("--abc", o.source.abc, "ABC field parameters A,B,C");
  sub->add_option("--torus-field", o.source.torus_field, "Torus field JSON file");
  sub->add_option("--sphere-field", o.source.sphere_field, "Sphere polynomial field JSON file");
  sub->add_flag("--rotation", o.source.rotation, "z-rotation field on S^2");
  if (with_tensor) sub->add_option("--tensor", o.source.tensor, "Quadratic tensor JSON file");
  sub->add_option("--degree", o.source.degree, "Harmonic degree N for sphere embeddings");
  sub->add_flag("--drop-constant", o.source.drop_constant, "Drop the constant harmonic");
  sub->add_option("--x0", o.source.x0, "Initial condition, comma separated");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string command = args.size() > 1 ? args[1] : "";
  Options opt;
  try {
    // --config FILE is expanded in place of itself.
    std::vector<std::string> expanded{args.front()};
    std::optional<Json> cfg;
    std::vector<std::string> rest;
    for (size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        cfg = read_json(args[++i]);
      } else if (args[i].rfind("--config=", 0) == 0) {
        cfg = read_json(args[i].substr(9));
      } else {
        rest.push_back(args[i]);
      }
    }
    if (cfg && (rest.empty() || rest.front().rfind("-", 0) == 0) && cfg->contains("command"))
      rest.insert(rest.begin(), cfg->at("command").get<std::string>());
    if (!rest.empty()) {
      command = rest.front();
      expanded.push_back(rest.front());
      if (cfg)
        for (auto& a : config_arguments(*cfg)) expanded.push_back(std::move(a));
      expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
    }

    CLI::App app{"Quadratic ODE embeddings of polynomic vector fields"};
    app.set_version_flag("--version", kToolVersion);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.add_option("--config", "JSON config file; explicit flags override its values");

    auto* embed_torus = app.add_subcommand("embed-torus", "Build the quadratic tensor of a torus field");
    add_common(embed_torus, opt);
    add_source(embed_torus, opt, false);
    embed_torus->add_flag("--keep-zero", opt.keep_zero, "Keep the zero frequency even for zero-mean fields");
    embed_torus->add_option("--tensor-out", opt.tensor_out, "Tensor output file");

    auto* embed_sphere = app.add_subcommand("embed-sphere", "Build the quadratic tensor of a sphere field");
    add_common(embed_sphere, opt);
    add_source(embed_sphere, opt, false);
    embed_sphere->add_option("--billiard", opt.billiard, "Triangle angles l1,l2,l3 for the billiard field on S^3");
    embed_sphere->add_option("--part", opt.part, "Billiard field part: re or im");
    embed_sphere->add_option("--tensor-out", opt.tensor_out, "Tensor output file");

    auto* verify = app.add_subcommand("verify", "Check antisymmetry, Tao's condition and divergence of a tensor");
    add_common(verify, opt);
    verify->add_option("--tensor", opt.source.tensor, "Quadratic tensor JSON file")->required();
    verify->add_option("--tol", opt.tol, "Pass tolerance");

    auto* integrate_cmd = app.add_subcommand("integrate", "Integrate a field or a quadratic tensor");
    add_common(integrate_cmd, opt);
    add_source(integrate_cmd, opt, true);
    integrate_cmd->add_option("--T", opt.T, "Time horizon");

    auto* compare = app.add_subcommand("compare", "Conjugacy error between a field and its quadratic embedding");
    add_common(compare, opt);
    add_source(compare, opt, false);
    compare->add_option("--T", opt.T, "Time horizon");
    compare->add_option("--grid", opt.grid, "Number of comparison times");
    compare->add_option("--max-error", opt.max_error, "Fail when the error exceeds this value");

    auto* lyap = app.add_subcommand("lyapunov", "Largest Lyapunov exponent");
    add_common(lyap, opt);
    add_source(lyap, opt, true);
    lyap->add_option("--T", opt.T, "Time horizon");
    lyap->add_option("--interval", opt.interval, "Renormalization interval");
    lyap->add_option("--transient", opt.transient, "Fraction of the horizon discarded");
    lyap->add_option("--scan", opt.scan, "Number of seeded candidates for a chaotic initial condition");
    lyap->add_option("--scan-horizon", opt.scan_horizon, "Horizon of each scan run");
    lyap->add_flag("--embedded", opt.embedded, "Also run the embedded quadratic flow");

    auto* poincare = app.add_subcommand("poincare", "Poincare section point cloud");
    add_common(poincare, opt);
    add_source(poincare, opt, false);
    poincare->add_option("--T", opt.T, "Time horizon");
    poincare->add_option("--normal", opt.normal, "Hyperplane normal, comma separated");
    poincare->add_option("--offset", opt.offset, "Hyperplane offset");
    poincare->add_flag("--periodic", opt.periodic, "Count crossings of every integer translate (always on for torus fields)");
    poincare->add_option("--direction", opt.direction, "+1 upward, -1 downward, 0 both");

    auto* nhim = app.add_subcommand("nhim-demo", "Equator persistence under perturbation");
    add_common(nhim, opt);
    nhim->add_option("--C", opt.contraction, "Contraction strength");
    nhim->add_option("--deltas", opt.deltas, "Perturbation sizes, comma separated");
    nhim->add_option("--t-settle", opt.t_settle, "Settling time limit");
    nhim->add_option("--project-degree", opt.project_degree, "Degree for the polynomial projection");

    auto* dims = app.add_subcommand("dims", "Harmonic and SO(d) x T^d dimensions");
    add_common(dims, opt);
    dims->add_option("--n", opt.n, "Sphere dimension");
    dims->add_option("--D", opt.project_degree, "Maximal harmonic degree");
    dims->add_option("--epsilon", opt.epsilon, "Approximation error for the Jackson bounds");
    dims->add_option("--k", opt.k, "Smoothness gap");
    dims->add_option("--m", opt.m, "Norm index");
    dims->add_option("--jackson-constant", opt.jackson_constant, "Jackson constant C'");
    dims->add_option("--norm", opt.norm, "Norm of the field");

    auto* lift = app.add_subcommand("lift-check", "Structure checks for the lift to SO(d) x T^d");
    add_common(lift, opt);
    lift->add_option("--d", opt.d, "Matrix dimension");
    lift->add_option("--max-length", opt.max_length, "Longest word for the sparsity check");
    lift->add_option("--fd-length", opt.fd_length, "Longest word for the derivative comparison");
    lift->add_option("--closure-d", opt.closure_d, "Largest d for commutator closure");
    lift->add_option("--K", opt.K, "Longest iterated commutator");

    // dims uses --D for the degree; give it a sensible default.
    opt.project_degree = command == "dims" ? 3 : 2;

    try {
      std::vector<const char*> cargv;
      for (const auto& a : expanded) cargv.push_back(a.c_str());
      app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      print_error("UsageError", e.what(), command);
      return kExitUsage;
    }

    if (embed_torus->parsed()) return run_embed_torus(opt);
    if (embed_sphere->parsed()) return run_embed_sphere(opt);
    if (verify->parsed()) return run_verify(opt);
    if (integrate_cmd->parsed()) return run_integrate(opt);
    if (compare->parsed()) return run_compare(opt);
    if (lyap->parsed()) return run_lyapunov(opt);
    if (poincare->parsed()) return run_poincare(opt);
    if (nhim->parsed()) return run_nhim_demo(opt);
    if (dims->parsed()) return run_dims(opt);
    if (lift->parsed()) return run_lift_check(opt);
    return kExitUsage;
  } catch (const Error& e) {
    print_error(std::string(error_code_name(e.code())), e.what(), command);
    return e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::ParseError ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    print_error("InternalError", e.what(), command);
    return kExitFailure;
  }
}
