// Order book and double-auction matching of buy and sell orders.
#pragma once

#include "p2p/network.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace p2p {

enum class Side { buy, sell };

struct Order {
  std::string id;
  Side side = Side::buy;
  BusId bus = 0;
  double price = 0.0;     // currency per kWh
  double quantity = 0.0;  // kWh
};

/// Proposed bilateral trade: `quantity` from seller_bus to buyer_bus.
struct Trade {
  std::string id;
  BusId seller_bus = 0;
  BusId buyer_bus = 0;
  double quantity = 0.0;     // kWh
  double match_price = 0.0;  // midpoint of bid and ask, settlement only
};

struct MatchResult {
  std::vector<Trade> trades;
  double total_matched = 0.0;
};

/// Truncates quantities so each bus sells at most gen_avail[bus] and buys at
/// most load_avail[bus]. Cheaper asks and dearer bids keep their quantity
/// first; equal prices keep input order. Output preserves input order and may
/// contain zero-quantity orders. Throws std::invalid_argument when a bus is
/// missing from the relevant availability map.
std::vector<Order> cap_orders(const std::vector<Order>& orders,
                              const std::map<BusId, double>& gen_avail,
                              const std::map<BusId, double>& load_avail);

/// Greedy double auction. Bids are visited from the lowest price up and each
/// is filled from the dearest ask it can still afford (bid >= ask). Because a
/// higher bid can afford every ask a lower bid can, serving the most
/// constrained bid first maximizes the matched volume. Equal prices are
/// ordered by larger quantity, then by id.
MatchResult match(const std::vector<Order>& buys, const std::vector<Order>& sells);

/// Order problems: negative price or quantity, unknown bus.
ValidationReport validate_orders(const std::vector<Order>& orders, const Network& net);

// Orders CSV: id,side,bus,price,quantity[,block]
struct OrderBook {
  bool has_block_column = false;
  std::map<long, std::vector<Order>> blocks;  // block 0 when no block column
};

OrderBook read_orders(const std::filesystem::path& path);
OrderBook parse_orders(std::istream& in, const std::string& source);
void write_orders(std::ostream& os, const std::vector<Order>& orders);

// Trades CSV: id,seller_bus,buyer_bus,quantity,match_price
std::vector<Trade> read_trades(const std::filesystem::path& path);
std::vector<Trade> parse_trades(std::istream& in, const std::string& source);
void write_trades(std::ostream& os, const std::vector<Trade>& trades);

}  // namespace p2p
