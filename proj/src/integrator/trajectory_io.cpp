#include "memwalk/integrator/trajectory_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace memwalk::integrator {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) {
    out.push_back(field);
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) {
    throw ArgumentError("malformed number '" + s + "'");
  }
  return v;
}

void write_vec(std::ostream& out, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) {
    out << ' ' << format_number(v[i]);
  }
}

Vec read_vec(std::istringstream& is, int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i) {
    std::string tok;
    if (!(is >> tok)) {
      throw ArgumentError("checkpoint vector is truncated");
    }
    v[i] = parse_double(tok);
  }
  return v;
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int d = traj.dim;
  out << 't';
  for (int i = 1; i <= d; ++i) {
    out << ",x" << i;
  }
  for (int i = 1; i <= d; ++i) {
    out << ",v" << i;
  }
  out << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    out << format_number(traj.times[k]);
    for (int i = 0; i < d; ++i) {
      out << ',' << format_number(s.x[i]);
    }
    for (int i = 0; i < d; ++i) {
      out << ',' << format_number(s.v[i]);
    }
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ArgumentError("empty trajectory file");
  }
  const auto header = split(line, ',');
  if (header.empty() || header[0] != "t" || header.size() % 2 != 1) {
    throw ArgumentError("trajectory header must be t,x1..xd,v1..vd");
  }
  Trajectory traj;
  traj.dim = static_cast<int>((header.size() - 1) / 2);
  const int d = traj.dim;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto f = split(line, ',');
    if (static_cast<int>(f.size()) != 2 * d + 1) {
      throw ArgumentError("trajectory row has the wrong number of fields");
    }
    WalkerState s;
    s.t = parse_double(f[0]);
    s.x = Vec(d);
    s.v = Vec(d);
    for (int i = 0; i < d; ++i) {
      s.x[i] = parse_double(f[static_cast<std::size_t>(1 + i)]);
      s.v[i] = parse_double(f[static_cast<std::size_t>(1 + d + i)]);
    }
    traj.times.push_back(s.t);
    traj.states.push_back(std::move(s));
  }
  if (traj.times.size() >= 2) {
    traj.dt = traj.times[1] - traj.times[0];
  }
  return traj;
}

void write_checkpoint(std::ostream& out, const Trajectory& traj) {
  write_trajectory_csv(out, traj);
  const HistoryBuffer& b = traj.final_buffer;
  const int d = traj.dim;
  out << "#checkpoint " << traj.steps_done << ' ' << d << '\n';
  out << "#state " << format_number(traj.final_state.t);
  write_vec(out, traj.final_state.x);
  write_vec(out, traj.final_state.v);
  out << '\n';
  out << "#rng " << traj.final_rng.key << ' ' << traj.final_rng.counter << ' ' << (traj.final_rng.has_spare ? 1 : 0)
      << ' ' << format_number(traj.final_rng.spare) << '\n';
  out << "#history " << format_number(b.dt()) << ' ' << b.n_mem() << ' ' << b.size() << ' ' << (b.has_tail() ? 1 : 0)
      << ' ' << (b.lossy() ? 1 : 0) << ' ' << format_number(b.max_evicted_norm()) << '\n';
  if (b.has_tail()) {
    out << "#tail";
    write_vec(out, b.tail());
    out << '\n';
  }
  for (int k = 0; k < b.size(); ++k) {
    out << "#eta";
    write_vec(out, b.sample(k));
    out << '\n';
  }
  out << "#end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  Checkpoint cp;
  int d = 0;
  bool have_header = false;
  bool have_history = false;
  bool done = false;
  double dt = 0.0;
  int n_mem = 0;
  int size = 0;
  bool has_tail = false;
  bool lossy = false;
  double max_evicted = 0.0;
  std::optional<Vec> tail;
  std::vector<Vec> samples;
  while (!done && std::getline(in, line)) {
    if (line.rfind('#', 0) != 0) {
      continue;
    }
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    if (tag == "#checkpoint") {
      is >> cp.step >> d;
      have_header = static_cast<bool>(is) && d >= 1 && d <= kMaxDim;
    } else if (!have_header) {
      continue;
    } else if (tag == "#state") {
      std::string tok;
      is >> tok;
      cp.state.t = parse_double(tok);
      cp.state.x = read_vec(is, d);
      cp.state.v = read_vec(is, d);
    } else if (tag == "#rng") {
      int spare = 0;
      std::string tok;
      is >> cp.rng.key >> cp.rng.counter >> spare >> tok;
      cp.rng.has_spare = spare != 0;
      cp.rng.spare = parse_double(tok);
    } else if (tag == "#history") {
      std::string dt_tok;
      std::string ev_tok;
      int tail_flag = 0;
      int lossy_flag = 0;
      is >> dt_tok >> n_mem >> size >> tail_flag >> lossy_flag >> ev_tok;
      if (!is) {
        throw ArgumentError("malformed #history line");
      }
      dt = parse_double(dt_tok);
      max_evicted = parse_double(ev_tok);
      has_tail = tail_flag != 0;
      lossy = lossy_flag != 0;
      have_history = true;
    } else if (tag == "#tail") {
      tail = read_vec(is, d);
    } else if (tag == "#eta") {
      samples.push_back(read_vec(is, d));
    } else if (tag == "#end") {
      done = true;
    }
  }
  if (!have_header || !have_history || !done) {
    throw ArgumentError("checkpoint trailer missing or incomplete");
  }
  if (static_cast<int>(samples.size()) != size || has_tail != tail.has_value()) {
    throw ArgumentError("checkpoint history is inconsistent");
  }
  cp.buffer = HistoryBuffer::from_samples(samples, dt, n_mem, tail);
  cp.buffer.set_loss_state(lossy, max_evicted);
  return cp;
}

}  // namespace memwalk::integrator
