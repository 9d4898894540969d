#include "somdsa/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "somdsa/errors.hpp"

namespace somdsa::model {

using nlohmann::json;

InterferenceTensor InterferenceTensor::zeros(int S, int C) {
  InterferenceTensor t;
  t.S = S;
  t.C = C;
  t.v.assign(static_cast<std::size_t>(S) * S * C, 0);
  return t;
}

AssignmentMatrix AssignmentMatrix::zeros(int S, int C) {
  AssignmentMatrix a;
  a.S = S;
  a.C = C;
  a.cells.assign(static_cast<std::size_t>(S) * C, 0);
  return a;
}

int AssignmentMatrix::row_sum(int n) const {
  int s = 0;
  for (int m = 0; m < C; ++m) s += at(n, m) ? 1 : 0;
  return s;
}

ProximityTensor build_proximity(const NetworkInstance& inst) {
  ProximityTensor p;
  p.S = inst.S;
  p.D = inst.C;
  p.v.assign(static_cast<std::size_t>(inst.S) * inst.S * inst.C, 0);
  for (int n = 0; n < inst.S; ++n) {
    for (int k = 0; k < inst.S; ++k) {
      int base = 0;
      if (n != k) {
        for (int m = 0; m < inst.C; ++m) base = std::max(base, inst.I.at(n, k, m));
      }
      p.at(n, k, 0) = base;
      for (int d = 1; d < p.D; ++d) {
        p.at(n, k, d) = std::max(0, p.at(n, k, d - 1) - 1);
      }
    }
  }
  return p;
}

long long cost(const AssignmentMatrix& a, const ProximityTensor& p) {
  if (a.S != p.S || a.C != p.D) {
    std::ostringstream os;
    os << "assignment " << a.S << "x" << a.C << " does not match proximity "
       << p.S << "x" << p.D;
    throw ShapeError(os.str());
  }
  long long total = 0;
  for (int n = 0; n < a.S; ++n) {
    for (int m = 0; m < a.C; ++m) {
      if (!a.at(n, m)) continue;
      for (int k = 0; k < a.S; ++k) {
        for (int j = 0; j < a.C; ++j) {
          if (!a.at(k, j)) continue;
          total += p.at(n, k, std::abs(m - j));
        }
      }
    }
  }
  return total;
}

InterferenceTensor interference_from_geometry(
    const std::vector<std::array<double, 2>>& positions, double radius,
    int C) {
  if (positions.empty()) {
    throw ConfigError("empty instance: at least one node required");
  }
  const int S = static_cast<int>(positions.size());
  InterferenceTensor t = InterferenceTensor::zeros(S, C);
  for (int n = 0; n < S; ++n) {
    for (int k = n + 1; k < S; ++k) {
      const double dx = positions[n][0] - positions[k][0];
      const double dy = positions[n][1] - positions[k][1];
      if (dx * dx + dy * dy <= radius * radius) {
        for (int m = 0; m < C; ++m) {
          t.at(n, k, m) = 1;
          t.at(k, n, m) = 1;
        }
      }
    }
  }
  return t;
}

std::vector<std::string> validate(const NetworkInstance& inst) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& s) { out.push_back(s); };

  if (inst.S < 1) add("S must be at least 1");
  if (inst.C < 1) add("C must be at least 1");
  if (static_cast<int>(inst.R.size()) != inst.S) {
    add("R has length " + std::to_string(inst.R.size()) + ", expected S=" +
        std::to_string(inst.S));
  }
  const bool shape_ok =
      inst.I.S == inst.S && inst.I.C == inst.C &&
      inst.I.v.size() ==
          static_cast<std::size_t>(inst.S) * inst.S * inst.C;
  if (!shape_ok) {
    add("I has shape " + std::to_string(inst.I.S) + "x" +
        std::to_string(inst.I.S) + "x" + std::to_string(inst.I.C) +
        ", expected " + std::to_string(inst.S) + "x" + std::to_string(inst.S) +
        "x" + std::to_string(inst.C));
  }

  for (std::size_t n = 0; n < inst.R.size(); ++n) {
    if (inst.R[n] < 0) {
      add("negative demand " + std::to_string(inst.R[n]) + " at SC " +
          std::to_string(n + 1));
    } else if (inst.R[n] > inst.C) {
      add("demand " + std::to_string(inst.R[n]) + " exceeds channels " +
          std::to_string(inst.C) + " at SC " + std::to_string(n + 1));
    }
  }

  if (shape_ok) {
    for (int n = 0; n < inst.S; ++n) {
      for (int m = 0; m < inst.C; ++m) {
        if (inst.I.at(n, n, m) != 0) {
          add("nonzero diagonal at (" + std::to_string(n + 1) + "," +
              std::to_string(n + 1) + "," + std::to_string(m + 1) + ")");
        }
      }
    }
    for (int n = 0; n < inst.S; ++n) {
      for (int k = 0; k < inst.S; ++k) {
        for (int m = 0; m < inst.C; ++m) {
          if (inst.I.at(n, k, m) < 0) {
            add("negative interference at (" + std::to_string(n + 1) + "," +
                std::to_string(k + 1) + "," + std::to_string(m + 1) + ")");
          }
          if (k > n && inst.I.at(n, k, m) != inst.I.at(k, n, m)) {
            add("asymmetric interference at (" + std::to_string(n + 1) + "," +
                std::to_string(k + 1) + "," + std::to_string(m + 1) + "): " +
                std::to_string(inst.I.at(n, k, m)) + " vs " +
                std::to_string(inst.I.at(k, n, m)));
          }
        }
      }
    }
  }

  if (inst.geometry) {
    const auto& g = *inst.geometry;
    if (static_cast<int>(g.positions.size()) != inst.S) {
      add("geometry has " + std::to_string(g.positions.size()) +
          " positions, expected S=" + std::to_string(inst.S));
    }
    if (!(g.radius >= 0.0)) add("geometry radius must be nonnegative");
    for (std::size_t a = 0; a < g.positions.size(); ++a) {
      for (std::size_t b = a + 1; b < g.positions.size(); ++b) {
        if (g.positions[a] == g.positions[b]) {
          add("duplicate position for SCs " + std::to_string(a + 1) + " and " +
              std::to_string(b + 1));
        }
      }
    }
  }
  return out;
}

namespace {

void reject_unknown_fields(const json& obj, const char* where,
                           std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (item.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("unknown field \"" + item.key() + "\" in " + where);
    }
  }
}

int require_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) {
    throw ParseError(what + " must be an integer");
  }
  return j.get<int>();
}

}  // namespace

NetworkInstance parse_instance_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid instance JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("instance JSON must be an object");
  reject_unknown_fields(j, "instance", {"S", "C", "R", "I", "geometry"});
  if (!j.contains("S") || !j.contains("C") || !j.contains("R")) {
    throw ParseError("instance JSON requires fields S, C and R");
  }

  NetworkInstance inst;
  inst.S = require_int(j.at("S"), "S");
  inst.C = require_int(j.at("C"), "C");
  if (inst.S < 1) throw ParseError("S must be at least 1");
  if (inst.C < 1) throw ParseError("C must be at least 1");

  const json& jr = j.at("R");
  if (!jr.is_array() || static_cast<int>(jr.size()) != inst.S) {
    throw ParseError("R must be an array of length S");
  }
  for (const auto& e : jr) inst.R.push_back(require_int(e, "R entry"));

  bool has_geometry =
      j.contains("geometry") && !j.at("geometry").is_null();
  if (has_geometry) {
    const json& jg = j.at("geometry");
    if (!jg.is_object()) throw ParseError("geometry must be an object");
    reject_unknown_fields(jg, "geometry", {"positions", "radius"});
    if (!jg.contains("positions") || !jg.contains("radius")) {
      throw ParseError("geometry requires fields positions and radius");
    }
    Geometry g;
    const json& jp = jg.at("positions");
    if (!jp.is_array() || static_cast<int>(jp.size()) != inst.S) {
      throw ParseError("geometry.positions must be an array of length S");
    }
    for (const auto& pos : jp) {
      if (!pos.is_array() || pos.size() != 2 || !pos[0].is_number() ||
          !pos[1].is_number()) {
        throw ParseError("geometry.positions entries must be [x,y] pairs");
      }
      g.positions.push_back({pos[0].get<double>(), pos[1].get<double>()});
    }
    if (!jg.at("radius").is_number()) {
      throw ParseError("geometry.radius must be a number");
    }
    g.radius = jg.at("radius").get<double>();
    inst.geometry = std::move(g);
  }

  if (j.contains("I")) {
    const json& ji = j.at("I");
    if (!ji.is_array() || static_cast<int>(ji.size()) != inst.S) {
      throw ParseError("I must be an SxSxC array");
    }
    inst.I = InterferenceTensor::zeros(inst.S, inst.C);
    for (int n = 0; n < inst.S; ++n) {
      const json& row = ji[n];
      if (!row.is_array() || static_cast<int>(row.size()) != inst.S) {
        throw ParseError("I must be an SxSxC array");
      }
      for (int k = 0; k < inst.S; ++k) {
        const json& cell = row[k];
        if (!cell.is_array() || static_cast<int>(cell.size()) != inst.C) {
          throw ParseError("I must be an SxSxC array");
        }
        for (int m = 0; m < inst.C; ++m) {
          inst.I.at(n, k, m) = require_int(cell[m], "I entry");
        }
      }
    }
  } else if (has_geometry) {
    inst.I = interference_from_geometry(inst.geometry->positions,
                                        inst.geometry->radius, inst.C);
  } else {
    throw ParseError("instance JSON requires I or geometry");
  }

  auto violations = validate(inst);
  if (!violations.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  return inst;
}

NetworkInstance load_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance_json(buf.str());
}

namespace {

json instance_to_json(const NetworkInstance& inst) {
  json j;
  j["S"] = inst.S;
  j["C"] = inst.C;
  j["R"] = inst.R;
  json ji = json::array();
  for (int n = 0; n < inst.S; ++n) {
    json row = json::array();
    for (int k = 0; k < inst.S; ++k) {
      json cell = json::array();
      for (int m = 0; m < inst.C; ++m) cell.push_back(inst.I.at(n, k, m));
      row.push_back(std::move(cell));
    }
    ji.push_back(std::move(row));
  }
  j["I"] = std::move(ji);
  if (inst.geometry) {
    json jg;
    json jp = json::array();
    for (const auto& p : inst.geometry->positions) {
      jp.push_back(json::array({p[0], p[1]}));
    }
    jg["positions"] = std::move(jp);
    jg["radius"] = inst.geometry->radius;
    j["geometry"] = std::move(jg);
  }
  return j;
}

}  // namespace

std::string instance_to_json_text(const NetworkInstance& inst, int indent) {
  std::string s = instance_to_json(inst).dump(indent);
  s.push_back('\n');
  return s;
}

std::string instance_fingerprint(const NetworkInstance& inst) {
  const std::string canon = instance_to_json(inst).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace somdsa::model
