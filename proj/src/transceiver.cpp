#include "beamlab/transceiver.hpp"

#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "beamlab/error.hpp"

namespace beamlab {

const char* to_string(trx_mode m) noexcept {
  switch (m) {
    case trx_mode::idle: return "IDLE";
    case trx_mode::tx: return "TX";
    case trx_mode::rx: return "RX";
  }
  return "?";
}

void pin_map::validate() const {
  std::set<int> used;
  for (int p : {spi_clk, spi_mosi, spi_miso, spi_cs_n, tx_rx_sw}) {
    if (!used.insert(p).second)
      throw error(errc::configuration, "pin " + std::to_string(p) + " assigned twice");
  }
  for (int g : grounds) {
    if (!used.insert(g).second)
      throw error(errc::configuration, "ground pin " + std::to_string(g) + " collides");
  }
}

namespace {

bool is_beam_pointer(const std::string& reg) {
  return reg == reg_bf_tx_awv_ptr || reg == reg_bf_rx_awv_ptr;
}

}  // namespace

transceiver::transceiver(transceiver_config config, std::shared_ptr<const beam_codebook> codebook,
                         int initial_beam)
    : config_(std::move(config)), codebook_(std::move(codebook)), initial_beam_(initial_beam) {
  config_.pins.validate();
  if (config_.spi_clock_divider < 1)
    throw error(errc::configuration, "spi_clock_divider must be >= 1");
  if (!(config_.guard_time >= 0.0)) throw error(errc::configuration, "guard_time must be >= 0");
  if (!codebook_) throw error(errc::configuration, "transceiver needs a codebook");
  if (!codebook_->contains(initial_beam))
    throw error(errc::codebook, "initial beam " + std::to_string(initial_beam) + " not in codebook");

  for (const auto& [name, addr] : config_.register_addresses) registers_[name] = 0;
  registers_[reg_bf_tx_awv_ptr] = static_cast<std::uint32_t>(initial_beam);
  registers_[reg_bf_rx_awv_ptr] = static_cast<std::uint32_t>(initial_beam);
}

void transceiver::spi_write(double time, const std::string& reg, std::uint32_t value) {
  auto it = registers_.find(reg);
  if (it == registers_.end()) throw error(errc::register_access, "unknown register '" + reg + "'");
  if (time < 0.0) throw error(errc::ordering, "negative transaction time");
  if (!spi_log_.empty() && time < spi_log_.back().time)
    throw error(errc::ordering, "SPI write at t=" + std::to_string(time) +
                                    " precedes last transaction at t=" +
                                    std::to_string(spi_log_.back().time));
  if (is_beam_pointer(reg) && !codebook_->contains(static_cast<int>(value)))
    throw error(errc::codebook, reg + " <- " + std::to_string(value) + " is not a codebook beam");
  it->second = value;
  spi_log_.push_back({time, reg, value, config_.pins.spi_cs_n});
}

std::uint32_t transceiver::read(const std::string& reg) const {
  auto it = registers_.find(reg);
  if (it == registers_.end()) throw error(errc::register_access, "unknown register '" + reg + "'");
  return it->second;
}

void transceiver::set_beam(double time, link_direction dir, int beam_id) {
  if (beam_id < 0 || !codebook_->contains(beam_id))
    throw error(errc::codebook, "beam " + std::to_string(beam_id) + " not in codebook");
  spi_write(time, dir == link_direction::tx ? reg_bf_tx_awv_ptr : reg_bf_rx_awv_ptr,
            static_cast<std::uint32_t>(beam_id));
}

void transceiver::set_trx_mode(double time, trx_mode mode) {
  bool violation = false;
  if (!mode_log_.empty()) {
    const double since = time - mode_log_.back().time;
    if (since < 0.0) throw error(errc::ordering, "mode change goes back in time");
    // Same-mode writes are housekeeping, not a switch.
    violation = mode != mode_ && since < config_.guard_time;
  }
  mode_log_.push_back({time, mode_, mode, config_.pins.tx_rx_sw, violation});
  mode_ = mode;
}

void transceiver::export_log(std::ostream& out, bool with_addresses) const {
  for (const auto& t : spi_log_) {
    nlohmann::ordered_json line;
    line["time"] = t.time;
    line["register"] = t.reg;
    line["value"] = t.value;
    line["chip_select"] = t.chip_select;
    if (with_addresses) {
      auto addr = config_.register_addresses.find(t.reg);
      if (addr != config_.register_addresses.end()) line["address"] = addr->second;
    }
    out << line.dump() << '\n';
  }
}

transceiver transceiver::replay(transceiver_config config,
                                std::shared_ptr<const beam_codebook> codebook, int initial_beam,
                                const std::vector<spi_transaction>& log) {
  transceiver t(std::move(config), std::move(codebook), initial_beam);
  for (const auto& tx : log) t.spi_write(tx.time, tx.reg, tx.value);
  return t;
}

}  // namespace beamlab
