#include "p2p/orderbook.hpp"

#include "p2p/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace p2p {

namespace {

double availability(const std::map<BusId, double>& avail, BusId bus, const char* what) {
  auto it = avail.find(bus);
  if (it == avail.end())
    throw std::invalid_argument(std::string("cap_orders: no ") + what + " availability for bus " +
                                std::to_string(bus));
  return std::max(0.0, it->second);
}

// Larger quantity first, then id.
bool tie_break(const Order& a, const Order& b) {
  if (a.quantity != b.quantity) return a.quantity > b.quantity;
  return a.id < b.id;
}

}  // namespace

std::vector<Order> cap_orders(const std::vector<Order>& orders,
                              const std::map<BusId, double>& gen_avail,
                              const std::map<BusId, double>& load_avail) {
  std::vector<Order> out = orders;
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Order& x = out[a];
    const Order& y = out[b];
    if (x.side != y.side) return x.side == Side::sell;
    return x.side == Side::sell ? x.price < y.price : x.price > y.price;
  });

  std::map<BusId, double> sell_left, buy_left;
  for (std::size_t k : order) {
    Order& o = out[k];
    auto& left = o.side == Side::sell ? sell_left : buy_left;
    auto it = left.find(o.bus);
    if (it == left.end()) {
      const double cap = o.side == Side::sell ? availability(gen_avail, o.bus, "generation")
                                              : availability(load_avail, o.bus, "load");
      it = left.emplace(o.bus, cap).first;
    }
    o.quantity = std::clamp(o.quantity, 0.0, it->second);
    it->second -= o.quantity;
  }
  return out;
}

MatchResult match(const std::vector<Order>& buys, const std::vector<Order>& sells) {
  std::vector<Order> bids = buys;
  std::vector<Order> asks = sells;
  std::sort(bids.begin(), bids.end(), [](const Order& a, const Order& b) {
    return a.price != b.price ? a.price < b.price : tie_break(a, b);
  });
  std::sort(asks.begin(), asks.end(), [](const Order& a, const Order& b) {
    return a.price != b.price ? a.price > b.price : tie_break(a, b);
  });

  MatchResult result;
  for (Order& bid : bids) {
    if (bid.quantity <= 0.0) continue;
    for (Order& ask : asks) {
      if (ask.quantity > 0.0 && bid.price >= ask.price) {
        const double q = std::min(bid.quantity, ask.quantity);
        result.trades.push_back({"t" + std::to_string(result.trades.size()), ask.bus, bid.bus, q,
                                 0.5 * (bid.price + ask.price)});
        bid.quantity -= q;
        ask.quantity -= q;
        if (bid.quantity <= 0.0) break;
      }
    }
  }
  for (const Trade& t : result.trades) result.total_matched += t.quantity;
  return result;
}

ValidationReport validate_orders(const std::vector<Order>& orders, const Network& net) {
  ValidationReport report;
  for (const Order& o : orders) {
    const std::string who = "order " + o.id;
    if (!(o.quantity >= 0.0) || !std::isfinite(o.quantity)) report.push_back({who, "negative quantity"});
    if (!(o.price >= 0.0) || !std::isfinite(o.price)) report.push_back({who, "negative price"});
    if (!net.has_bus(o.bus)) report.push_back({who, "unknown bus " + std::to_string(o.bus)});
  }
  return report;
}

namespace {

void require_columns(const CsvTable& table, const std::vector<std::string>& names,
                     const std::string& source) {
  for (const auto& n : names)
    if (table.column(n) < 0) throw FormatError(source + ": missing column \"" + n + "\"");
}

const std::string& cell(const CsvTable& table, const CsvRecord& rec, const std::string& name,
                        const std::string& source) {
  const int c = table.column(name);
  if (rec.fields.size() != table.header.size())
    throw FormatError(source + ":" + std::to_string(rec.line) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(rec.fields.size()));
  return rec.fields[static_cast<std::size_t>(c)];
}

}  // namespace

OrderBook parse_orders(std::istream& in, const std::string& source) {
  const CsvTable table = parse_csv(in, source);
  require_columns(table, {"id", "side", "bus", "price", "quantity"}, source);
  OrderBook book;
  book.has_block_column = table.column("block") >= 0;
  for (const CsvRecord& rec : table.records) {
    const std::string where = source + ":" + std::to_string(rec.line);
    Order o;
    o.id = cell(table, rec, "id", source);
    const std::string& side = cell(table, rec, "side", source);
    if (side == "buy") o.side = Side::buy;
    else if (side == "sell") o.side = Side::sell;
    else throw FormatError(where + ": side must be buy or sell");
    o.bus = static_cast<BusId>(parse_integer(cell(table, rec, "bus", source), where));
    o.price = parse_number(cell(table, rec, "price", source), where);
    o.quantity = parse_number(cell(table, rec, "quantity", source), where);
    if (o.quantity < 0.0) throw FormatError(where + ": negative quantity");
    if (o.price < 0.0) throw FormatError(where + ": negative price");
    const long block = book.has_block_column ? parse_integer(cell(table, rec, "block", source), where) : 0;
    book.blocks[block].push_back(std::move(o));
  }
  return book;
}

OrderBook read_orders(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_orders(in, path.string());
}

void write_orders(std::ostream& os, const std::vector<Order>& orders) {
  os << "id,side,bus,price,quantity\n";
  for (const Order& o : orders)
    os << o.id << ',' << (o.side == Side::buy ? "buy" : "sell") << ',' << o.bus << ','
       << format_number(o.price) << ',' << format_number(o.quantity) << '\n';
}

std::vector<Trade> parse_trades(std::istream& in, const std::string& source) {
  const CsvTable table = parse_csv(in, source);
  require_columns(table, {"id", "seller_bus", "buyer_bus", "quantity", "match_price"}, source);
  std::vector<Trade> trades;
  for (const CsvRecord& rec : table.records) {
    const std::string where = source + ":" + std::to_string(rec.line);
    Trade t;
    t.id = cell(table, rec, "id", source);
    t.seller_bus = static_cast<BusId>(parse_integer(cell(table, rec, "seller_bus", source), where));
    t.buyer_bus = static_cast<BusId>(parse_integer(cell(table, rec, "buyer_bus", source), where));
    t.quantity = parse_number(cell(table, rec, "quantity", source), where);
    t.match_price = parse_number(cell(table, rec, "match_price", source), where);
    if (!(t.quantity > 0.0)) throw FormatError(where + ": trade quantity must be positive");
    trades.push_back(std::move(t));
  }
  return trades;
}

std::vector<Trade> read_trades(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_trades(in, path.string());
}

void write_trades(std::ostream& os, const std::vector<Trade>& trades) {
  os << "id,seller_bus,buyer_bus,quantity,match_price\n";
  for (const Trade& t : trades)
    os << t.id << ',' << t.seller_bus << ',' << t.buyer_bus << ',' << format_number(t.quantity) << ','
       << format_number(t.match_price) << '\n';
}

}  // namespace p2p
