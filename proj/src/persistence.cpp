#include "xvpa/persistence.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace xvpa {

namespace {

constexpr std::string_view kHeader = "xvpa-state 1";

bool plain(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
         c == '-' || c == '@' || c == '{' || c == '}' || c == ':' || c == '/' || c == '#' || c == '$';
}

std::string escape(std::string_view token) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (char ch : token) {
    auto c = static_cast<unsigned char>(ch);
    if (plain(ch)) {
      out += ch;
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string unescape(std::string_view token, std::size_t line) {
  auto digit = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw StateFileError(line, "bad escape in '" + std::string(token) + "'");
  };
  std::string out;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] != '%') {
      if (!plain(token[i])) throw StateFileError(line, "unescaped character in '" + std::string(token) + "'");
      out += token[i];
      continue;
    }
    if (i + 2 >= token.size()) throw StateFileError(line, "truncated escape in '" + std::string(token) + "'");
    out += static_cast<char>(digit(token[i + 1]) * 16 + digit(token[i + 2]));
    i += 2;
  }
  return out;
}

std::string joinList(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ',';
    out += escape(tokens[i]);
  }
  return out;
}

std::vector<std::string> splitList(std::string_view text, std::size_t line) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto comma = text.find(',', pos);
    auto piece = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (piece.empty()) throw StateFileError(line, "empty token in state name");
    out.push_back(unescape(piece, line));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

// "u1,u2|v1"; the start state is "|".
std::string encode(const StateName& q) { return joinList(q.context) + "|" + joinList(q.siblings); }

StateName decode(std::string_view text, std::size_t line) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos || text.find('|', bar + 1) != std::string_view::npos) {
    throw StateFileError(line, "malformed state name '" + std::string(text) + "'");
  }
  return StateName{splitList(text.substr(0, bar), line), splitList(text.substr(bar + 1), line)};
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    auto space = line.find(' ', pos);
    if (space == std::string_view::npos) space = line.size();
    out.push_back(line.substr(pos, space - pos));
    pos = space + 1;
  }
  return out;
}

std::uint64_t number(std::string_view text, std::size_t line) {
  if (text.empty() || text.size() > 20) throw StateFileError(line, "bad number '" + std::string(text) + "'");
  std::uint64_t value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw StateFileError(line, "bad number '" + std::string(text) + "'");
    auto digit = static_cast<std::uint64_t>(c - '0');
    if (value > (UINT64_MAX - digit) / 10) throw StateFileError(line, "number out of range");
    value = value * 10 + digit;
  }
  if (text.size() > 1 && text[0] == '0') throw StateFileError(line, "non-canonical number '" + std::string(text) + "'");
  return value;
}

WeightedVpa::Count weight(std::string_view text, std::size_t line) {
  auto w = number(text, line);
  if (w == 0) throw StateFileError(line, "zero weight is never stored");
  return w;
}

}  // namespace

std::string serializeState(const Learner& learner) {
  std::ostringstream out;
  const auto& dts = learner.dts();
  const auto& vpa = learner.vpa();
  out << kHeader << '\n';
  out << "scheme " << learner.scheme().render() << '\n';
  out << "datatypes " << learner.dtsHash() << '\n';
  out << "sanitized " << (learner.sanitized() ? 1 : 0) << '\n';
  out << "documents " << learner.documentsLearned() << '\n';
  for (const auto& mc : learner.mindChangeLog()) out << "mc " << mc.digest << ' ' << mc.count << '\n';
  for (const auto& [q, w] : vpa.states()) out << "state " << w << ' ' << encode(q) << '\n';
  for (const auto& [q, w] : vpa.finals()) out << "final " << w << ' ' << encode(q) << '\n';
  for (const auto& [t, w] : vpa.calls()) {
    out << "call " << w << ' ' << encode(t.source) << ' ' << escape(t.element) << ' ' << encode(t.target) << '\n';
  }
  for (const auto& [t, w] : vpa.internals()) {
    out << "int " << w << ' ' << encode(t.source) << ' ' << escape(dts.name(t.datatype)) << ' ' << encode(t.target)
        << '\n';
  }
  for (const auto& [t, w] : vpa.returns()) {
    out << "ret " << w << ' ' << encode(t.source) << ' ' << escape(t.element) << ' ' << encode(t.popped) << ' '
        << encode(t.target) << '\n';
  }
  out << "end\n";
  return out.str();
}

Learner parseState(std::string_view text, std::shared_ptr<const LexicalDatatypeSystem> dts) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) throw StateFileError(lines.size() + 1, "missing final newline");
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.empty() || lines[0] != kHeader) throw StateFileError(1, "expected header '" + std::string(kHeader) + "'");
  if (lines.back() != "end") throw StateFileError(lines.size(), "missing 'end' line (truncated file?)");

  auto scalar = [&](std::size_t i, std::string_view key) {
    if (i >= lines.size() || !lines[i].starts_with(key) || lines[i].size() <= key.size() ||
        lines[i][key.size()] != ' ') {
      throw StateFileError(i + 1, "expected '" + std::string(key) + "'");
    }
    return lines[i].substr(key.size() + 1);
  };
  NamingScheme scheme;
  try {
    scheme = NamingScheme::parse(scalar(1, "scheme"));
  } catch (const std::invalid_argument& e) {
    throw StateFileError(2, e.what());
  }
  std::string hash(scalar(2, "datatypes"));
  auto sanitizedText = scalar(3, "sanitized");
  if (sanitizedText != "0" && sanitizedText != "1") throw StateFileError(4, "sanitized must be 0 or 1");
  auto documents = number(scalar(4, "documents"), 5);

  std::vector<Learner::MindChange> series;
  WeightedVpa vpa;
  int section = 0;  // mc, state, final, call, int, ret
  auto order = [&](int s, std::size_t line) {
    if (s < section) throw StateFileError(line, "records out of canonical order");
    section = s;
  };
  for (std::size_t i = 5; i + 1 < lines.size(); ++i) {
    const std::size_t line = i + 1;
    auto f = fields(lines[i]);
    auto expect = [&](std::size_t n) {
      if (f.size() != n) throw StateFileError(line, "expected " + std::to_string(n) + " fields");
    };
    if (f[0] == "mc") {
      expect(3);
      order(0, line);
      if (f[1].size() != 64) throw StateFileError(line, "bad digest");
      series.push_back({std::string(f[1]), number(f[2], line)});
    } else if (f[0] == "state") {
      expect(3);
      order(1, line);
      auto q = decode(f[2], line);
      vpa.setState(q, q.isStart() ? number(f[1], line) : weight(f[1], line));
    } else if (f[0] == "final") {
      expect(3);
      order(2, line);
      vpa.setFinal(decode(f[2], line), weight(f[1], line));
    } else if (f[0] == "call") {
      expect(5);
      order(3, line);
      vpa.set(CallTransition{decode(f[2], line), unescape(f[3], line), decode(f[4], line)}, weight(f[1], line));
    } else if (f[0] == "int") {
      expect(5);
      order(4, line);
      auto id = dts->find(unescape(f[3], line));
      if (!id) throw StateFileError(line, "unknown datatype '" + std::string(f[3]) + "'");
      vpa.set(InternalTransition{decode(f[2], line), *id, decode(f[4], line)}, weight(f[1], line));
    } else if (f[0] == "ret") {
      expect(6);
      order(5, line);
      vpa.set(ReturnTransition{decode(f[2], line), unescape(f[3], line), decode(f[4], line), decode(f[5], line)},
              weight(f[1], line));
    } else {
      throw StateFileError(line, "unknown record '" + std::string(f[0]) + "'");
    }
  }
  return Learner::restore(scheme, std::move(dts), std::move(hash), sanitizedText == "1", documents, std::move(series),
                          std::move(vpa));
}

Learner loadState(const std::filesystem::path& path, std::shared_ptr<const LexicalDatatypeSystem> dts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read state file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseState(buffer.str(), std::move(dts));
}

void saveState(const std::filesystem::path& path, const Learner& learner) {
  const std::string text = serializeState(learner);
  auto temp = path;
  temp += ".tmp." + std::to_string(::getpid());
  int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "cannot create " + temp.string());
  std::size_t written = 0;
  while (written < text.size()) {
    auto n = ::write(fd, text.data() + written, text.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      ::unlink(temp.c_str());
      throw std::system_error(err, std::generic_category(), "cannot write " + temp.string());
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    int err = errno;
    ::unlink(temp.c_str());
    throw std::system_error(err, std::generic_category(), "cannot flush " + temp.string());
  }
  if (::rename(temp.c_str(), path.c_str()) != 0) {
    int err = errno;
    ::unlink(temp.c_str());
    throw std::system_error(err, std::generic_category(), "cannot replace " + path.string());
  }
}

StateLock::StateLock(const std::filesystem::path& path) {
  auto lockPath = path;
  lockPath += ".lock";
  fd_ = ::open(lockPath.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw std::system_error(errno, std::generic_category(), "cannot open " + lockPath.string());
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno != EINTR) {
      int err = errno;
      ::close(fd_);
      throw std::system_error(err, std::generic_category(), "cannot lock " + lockPath.string());
    }
  }
}

StateLock::~StateLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

}  // namespace xvpa
