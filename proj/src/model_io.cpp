#include "karst/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace karst {

namespace {

constexpr const char* kMagic = "karstml model v1";

void write_array(std::ostream& out, const std::string& name, const Matrix& m) {
  out << "array " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[40];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << buf << (c + 1 == m.cols() ? '\n' : ' ');
    }
  }
}

void write_array(std::ostream& out, const std::string& name, const Vector& v) {
  write_array(out, name, Matrix(v));
}

struct Reader {
  std::ifstream in;
  std::string path;
  int line_no = 0;

  explicit Reader(const std::filesystem::path& p) : in(p), path(p.string()) {
    if (!in) throw IoError("cannot open model file '" + path + "'");
  }

  std::string next_line() {
    std::string line;
    if (!std::getline(in, line)) {
      throw ValidationError(path + ": unexpected end of model file");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& message) {
    throw ValidationError(path + ":" + std::to_string(line_no) + ": " + message);
  }
};

struct Document {
  std::map<std::string, std::string> fields;
  std::map<std::string, Matrix> arrays;

  const std::string& field(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw ValidationError("model file missing field '" + key + "'");
    }
    return it->second;
  }

  const Matrix& array(const std::string& key) const {
    auto it = arrays.find(key);
    if (it == arrays.end()) {
      throw ValidationError("model file missing array '" + key + "'");
    }
    return it->second;
  }

  bool has_array(const std::string& key) const { return arrays.count(key) > 0; }
};

Document read_document(Reader& r) {
  if (r.next_line() != kMagic) r.fail("not a karstml v1 model file");
  Document doc;
  for (;;) {
    std::string line = r.next_line();
    if (line == "end") break;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "field" || tag == "kind") {
      std::string key, value;
      if (tag == "kind") {
        key = "kind";
        ss >> value;
      } else {
        ss >> key >> value;
      }
      if (key.empty() || value.empty()) r.fail("malformed field line");
      doc.fields[key] = value;
    } else if (tag == "array") {
      std::string name;
      Index rows = 0, cols = 0;
      ss >> name >> rows >> cols;
      if (name.empty() || rows < 1 || cols < 1) r.fail("malformed array header");
      Matrix m(rows, cols);
      for (Index row = 0; row < rows; ++row) {
        std::istringstream vs(r.next_line());
        for (Index col = 0; col < cols; ++col) {
          if (!(vs >> m(row, col))) r.fail("short array row in '" + name + "'");
        }
      }
      doc.arrays[name] = std::move(m);
    } else {
      r.fail("unknown record '" + tag + "'");
    }
  }
  return doc;
}

double field_number(const Document& doc, const std::string& key) {
  return std::stod(doc.field(key));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file '" + path.string() + "'");
  return out;
}

void write_scalar_field(std::ostream& out, const std::string& key, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << "field " << key << ' ' << buf << '\n';
}

}  // namespace

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kMagic << "\nkind mlp\n";
  out << "field trained " << (model.trained ? 1 : 0) << '\n';
  write_scalar_field(out, "b2", model.b2);
  write_array(out, "w1", model.w1);
  write_array(out, "b1", model.b1);
  write_array(out, "w2", model.w2);
  out << "end\n";
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_model(const LstmModel& model, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kMagic << "\nkind lstm\n";
  out << "field trained " << (model.trained ? 1 : 0) << '\n';
  out << "field layers " << model.num_layers() << '\n';
  write_scalar_field(out, "b_d", model.b_d);
  for (int l = 0; l < model.num_layers(); ++l) {
    const LstmLayer& layer = model.layers[static_cast<size_t>(l)];
    const std::string p = "layer" + std::to_string(l) + ".";
    write_array(out, p + "u_g", layer.u_g);
    write_array(out, p + "u_i", layer.u_i);
    write_array(out, p + "u_f", layer.u_f);
    write_array(out, p + "u_o", layer.u_o);
    write_array(out, p + "v_g", layer.v_g);
    write_array(out, p + "v_i", layer.v_i);
    write_array(out, p + "v_f", layer.v_f);
    write_array(out, p + "v_o", layer.v_o);
    write_array(out, p + "b_g", layer.b_g);
    write_array(out, p + "b_i", layer.b_i);
    write_array(out, p + "b_f", layer.b_f);
    write_array(out, p + "b_o", layer.b_o);
  }
  write_array(out, "w_d", model.w_d);
  out << "end\n";
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_model(const SvrModel& model, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kMagic << "\nkind svr\n";
  out << "field trained " << (model.trained ? 1 : 0) << '\n';
  out << "field kernel " << kernel_name(model.kernel.kind) << '\n';
  out << "field degree " << model.kernel.degree << '\n';
  write_scalar_field(out, "gamma", model.kernel.gamma);
  write_scalar_field(out, "coef0", model.kernel.coef0);
  write_scalar_field(out, "epsilon", model.epsilon);
  write_scalar_field(out, "c", model.c);
  write_scalar_field(out, "bias", model.bias);
  write_array(out, "support_x", model.support_x);
  write_array(out, "coeff", model.coeff);
  if (model.norm_ref) {
    write_array(out, "norm_min", model.norm_ref->col_min);
    write_array(out, "norm_max", model.norm_ref->col_max);
  }
  out << "end\n";
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

AnyModel load_model(const std::filesystem::path& path) {
  Reader reader(path);
  Document doc = read_document(reader);
  const std::string kind = doc.field("kind");
  const bool trained = doc.field("trained") == "1";

  if (kind == "mlp") {
    MlpModel m;
    m.w1 = doc.array("w1");
    m.b1 = doc.array("b1").col(0);
    m.w2 = doc.array("w2");
    m.b2 = field_number(doc, "b2");
    m.trained = trained;
    if (m.w2.cols() != m.w1.rows() || m.b1.size() != m.w1.rows()) {
      throw ValidationError(path.string() + ": inconsistent mlp shapes");
    }
    return m;
  }
  if (kind == "lstm") {
    LstmModel m;
    const int layers = static_cast<int>(field_number(doc, "layers"));
    if (layers < 1) throw ValidationError(path.string() + ": layers must be >= 1");
    for (int l = 0; l < layers; ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      LstmLayer layer;
      layer.u_g = doc.array(p + "u_g");
      layer.u_i = doc.array(p + "u_i");
      layer.u_f = doc.array(p + "u_f");
      layer.u_o = doc.array(p + "u_o");
      layer.v_g = doc.array(p + "v_g");
      layer.v_i = doc.array(p + "v_i");
      layer.v_f = doc.array(p + "v_f");
      layer.v_o = doc.array(p + "v_o");
      layer.b_g = doc.array(p + "b_g").col(0);
      layer.b_i = doc.array(p + "b_i").col(0);
      layer.b_f = doc.array(p + "b_f").col(0);
      layer.b_o = doc.array(p + "b_o").col(0);
      m.layers.push_back(std::move(layer));
    }
    m.w_d = doc.array("w_d");
    m.b_d = field_number(doc, "b_d");
    m.trained = trained;
    return m;
  }
  if (kind == "svr") {
    SvrModel m;
    m.kernel.kind = kernel_from_name(doc.field("kernel"));
    m.kernel.degree = static_cast<int>(field_number(doc, "degree"));
    m.kernel.gamma = field_number(doc, "gamma");
    m.kernel.coef0 = field_number(doc, "coef0");
    m.epsilon = field_number(doc, "epsilon");
    m.c = field_number(doc, "c");
    m.bias = field_number(doc, "bias");
    m.support_x = doc.array("support_x");
    m.coeff = doc.array("coeff").col(0);
    if (doc.has_array("norm_min")) {
      NormalizationParams norm;
      norm.col_min = doc.array("norm_min").col(0);
      norm.col_max = doc.array("norm_max").col(0);
      m.norm_ref = norm;
    }
    m.trained = trained;
    if (m.coeff.size() != m.support_x.rows()) {
      throw ValidationError(path.string() + ": inconsistent svr shapes");
    }
    return m;
  }
  throw ValidationError(path.string() + ": unknown model kind '" + kind + "'");
}

}  // namespace karst
