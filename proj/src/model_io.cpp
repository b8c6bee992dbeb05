#include "milboost/model_io.hpp"

#include "milboost/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mil {

using json = nlohmann::ordered_json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from(const json& a) {
  if (!a.is_array()) throw ParseError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

std::string model_to_json(const ModelFile& file) {
  const EnsembleModel& m = file.model;
  json j;
  j["format"] = "milboost-model";
  j["version"] = kModelFormatVersion;

  json k;
  k["kind"] = to_string(m.kernel.kind);
  if (m.kernel.kind == KernelKind::Gaussian) k["sigma"] = m.kernel.sigma;
  j["kernel"] = k;
  j["norm"] = to_string(m.norm);
  j["nu"] = m.nu;

  if (file.window) {
    json w;
    w["length"] = file.window->length;
    w["znormalize"] = file.window->znormalize;
    j["window"] = w;
  }

  if (!file.labels.empty()) {
    json l;
    for (const auto& [name, y] : file.labels) l[name] = y;
    j["labels"] = l;
  }

  json pool;
  pool["dimension"] = m.pool.dim();
  json inst = json::array(), orig = json::array();
  for (std::size_t i = 0; i < m.pool.size(); ++i) {
    inst.push_back(vector_json(m.pool.instances[i]));
    orig.push_back(json::array({m.pool.origins[i].bag, m.pool.origins[i].offset}));
  }
  pool["instances"] = std::move(inst);
  pool["origins"] = std::move(orig);
  j["pool"] = std::move(pool);

  json shapelets = json::array();
  for (const auto& ws : m.shapelets) {
    json s;
    s["weight"] = ws.weight;
    json alpha = json::array();
    for (Eigen::Index z = 0; z < ws.shapelet.alpha.size(); ++z)
      if (ws.shapelet.alpha[z] != 0.0) alpha.push_back(json::array({z, ws.shapelet.alpha[z]}));
    s["alpha"] = std::move(alpha);
    shapelets.push_back(std::move(s));
  }
  j["shapelets"] = std::move(shapelets);

  json meta;
  meta["iterations"] = m.meta.iterations;
  meta["hypotheses"] = m.meta.hypotheses;
  meta["final_gamma"] = m.meta.final_gamma;
  meta["stop_reason"] = m.meta.stop_reason;
  meta["pruned"] = m.meta.pruned;
  j["training"] = std::move(meta);

  return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text, std::shared_ptr<const Eigen::MatrixXd> gram) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "milboost-model") throw ParseError("not a milboost model");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw ParseError("unsupported model version " + std::to_string(version));

    ModelFile out;
    EnsembleModel& m = out.model;
    const json& k = j.at("kernel");
    switch (kernel_kind_from_string(k.at("kind").get<std::string>())) {
      case KernelKind::Linear:
        m.kernel = KernelSpec::linear();
        break;
      case KernelKind::Gaussian:
        m.kernel = KernelSpec::gaussian(k.at("sigma").get<double>());
        break;
      case KernelKind::Precomputed:
        m.kernel.kind = KernelKind::Precomputed;
        m.kernel.gram = std::move(gram);
        break;
    }
    m.norm = norm_kind_from_string(j.at("norm").get<std::string>());
    m.nu = j.at("nu").get<double>();

    if (j.contains("window")) {
      WindowConfig w;
      w.length = j["window"].at("length").get<int>();
      w.znormalize = j["window"].at("znormalize").get<bool>();
      out.window = w;
    }

    if (j.contains("labels"))
      for (const auto& [name, y] : j["labels"].items()) out.labels[name] = y.get<int>();

    const json& pool = j.at("pool");
    const auto dim = pool.at("dimension").get<Eigen::Index>();
    const json& inst = pool.at("instances");
    const json& orig = pool.at("origins");
    if (inst.size() != orig.size()) throw ParseError("pool instances and origins differ in length");
    for (std::size_t i = 0; i < inst.size(); ++i) {
      Eigen::VectorXd x = vector_from(inst[i]);
      if (x.size() != dim) throw ParseError("pool instance " + std::to_string(i) + " has wrong dimension");
      m.pool.instances.push_back(std::move(x));
      m.pool.origins.push_back({orig[i].at(0).get<std::size_t>(), orig[i].at(1).get<std::size_t>()});
    }

    const auto p = static_cast<Eigen::Index>(m.pool.size());
    for (const json& s : j.at("shapelets")) {
      WeightedShapelet ws;
      ws.weight = s.at("weight").get<double>();
      ws.shapelet.norm = m.norm;
      ws.shapelet.alpha = Eigen::VectorXd::Zero(p);
      for (const json& e : s.at("alpha")) {
        const auto z = e.at(0).get<Eigen::Index>();
        if (z < 0 || z >= p) throw ParseError("alpha index out of range");
        ws.shapelet.alpha[z] = e.at(1).get<double>();
      }
      m.shapelets.push_back(std::move(ws));
    }
    if (m.shapelets.empty()) throw ParseError("model has no shapelets");

    const json& meta = j.at("training");
    m.meta.iterations = meta.at("iterations").get<int>();
    m.meta.hypotheses = meta.at("hypotheses").get<int>();
    m.meta.final_gamma = meta.at("final_gamma").get<double>();
    m.meta.stop_reason = meta.at("stop_reason").get<std::string>();
    m.meta.pruned = meta.at("pruned").get<std::vector<int>>();
    return out;
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

void save_model(const std::string& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << model_to_json(file);
  if (!out) throw Error("failed writing " + path);
}

ModelFile load_model(const std::string& path, std::shared_ptr<const Eigen::MatrixXd> gram) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return model_from_json(ss.str(), std::move(gram));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace mil
