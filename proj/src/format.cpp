#include "pcnoise/format.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "pcnoise/error.hpp"

namespace pcnoise {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kDegenerateRay: return "DegenerateRay";
    case ErrorCode::kUnknownTier: return "UnknownTier";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kMissingSigma: return "MissingSigma";
    case ErrorCode::kTooFewValues: return "TooFewValues";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace {

std::string missing_message(const std::vector<std::string>& ids) {
  std::string msg = "no sigma for sample id(s):";
  for (const auto& id : ids) {
    msg += ' ';
    msg += id;
  }
  return msg;
}

}  // namespace

MissingSigmaError::MissingSigmaError(std::vector<std::string> ids)
    : Error(ErrorCode::kMissingSigma, missing_message(ids)),
      ids_(std::move(ids)) {}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  // from_chars rejects a leading '+', which is fine for our formats.
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

bool parse_uint64(std::string_view text, std::uint64_t& out) {
  if (text.empty()) return false;
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n";
  auto b = text.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = text.find_last_not_of(ws);
  return text.substr(b, e - b + 1);
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::kIo,
                "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::vector<std::string_view> split_lines(std::string_view contents) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < contents.size()) {
    auto pos = contents.find('\n', start);
    auto line = contents.substr(
        start, pos == std::string_view::npos ? std::string_view::npos
                                             : pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return lines;
}

}  // namespace pcnoise
