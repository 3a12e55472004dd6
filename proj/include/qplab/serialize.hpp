#pragma once

#include "qplab/contfrac.hpp"
#include "qplab/kam.hpp"
#include "qplab/spectra.hpp"

#include "json.hpp"

#include <initializer_list>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace qplab::io {

using Json = nlohmann::ordered_json;

// %.17g; nan, inf, -inf spelled out
std::string format_double(double x);
// inverse of format_double, exact
double parse_double(const std::string& s);

// finite doubles as numbers, non-finite as null
Json number(double x);
// null reads back as NaN
double to_double(const Json& j);
// big integers travel as decimal strings
Json big(const cf::BigInt& x);
cf::BigInt to_big(const Json& j);

struct Column {
  std::string name;
  std::string unit = "1";
};

using Cell = std::variant<double, long long, std::string>;

// Header row "name[unit],...", then one line per row.
class CsvWriter {
public:
  CsvWriter(std::ostream& out, std::vector<Column> cols);
  void row(const std::vector<Cell>& cells);
  int rows() const { return rows_; }

private:
  std::ostream& out_;
  size_t width_;
  int rows_ = 0;
};

// one compact object per line
void write_jsonl(std::ostream& out, const std::vector<Json>& lines);

Json to_json(const cf::CfExpansion& cf);
Json to_json(const cf::BridgeSelection& sel);
Json to_json(const spectra::BandSet& s);
spectra::BandSet band_set_from_json(const Json& j);
Json to_json(const kam::LedgerRecord& r);
kam::LedgerRecord ledger_record_from_json(const Json& j);
Json to_json(const kam::StepReport& r);
Json to_json(const kam::DivisorFloor& d);

}  // namespace qplab::io
