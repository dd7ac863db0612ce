#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "beamlab/codebook.hpp"

namespace beamlab {

inline constexpr const char* reg_bf_tx_awv_ptr = "bf_tx_awv_ptr";
inline constexpr const char* reg_bf_rx_awv_ptr = "bf_rx_awv_ptr";

enum class trx_mode { idle, tx, rx };
enum class link_direction { tx, rx };

const char* to_string(trx_mode m) noexcept;

// GPIO pins wired between the radio's front panel and the array board.
struct pin_map {
  int spi_clk = 0;
  int spi_mosi = 1;
  int spi_miso = 2;
  int spi_cs_n = 3;
  int tx_rx_sw = 4;
  std::vector<int> grounds{5, 6};

  // Throws errc::configuration when any two pins collide.
  void validate() const;
};

struct spi_transaction {
  double time = 0.0;
  std::string reg;
  std::uint32_t value = 0;
  int chip_select = 0;

  friend bool operator==(const spi_transaction&, const spi_transaction&) = default;
};

struct mode_event {
  double time = 0.0;
  trx_mode from = trx_mode::idle;
  trx_mode to = trx_mode::idle;
  int pin = 0;
  bool timing_violation = false;
};

struct transceiver_config {
  pin_map pins;
  int spi_clock_divider = 4;
  double guard_time = 1e-6;  // s
  // Symbolic register name -> address, used only for trace export.
  std::map<std::string, std::uint32_t> register_addresses{{reg_bf_tx_awv_ptr, 0x00},
                                                          {reg_bf_rx_awv_ptr, 0x01}};
};

/// Transaction-level model of the phased-array board.
///
/// Beam pointers are only changed through logged SPI writes, so folding
/// spi_log() over a fresh instance reproduces the register file.
class transceiver {
 public:
  transceiver(transceiver_config config, std::shared_ptr<const beam_codebook> codebook,
              int initial_beam);

  void spi_write(double time, const std::string& reg, std::uint32_t value);
  std::uint32_t read(const std::string& reg) const;

  void set_beam(double time, link_direction dir, int beam_id);
  void set_trx_mode(double time, trx_mode mode);

  trx_mode mode() const noexcept { return mode_; }
  int tx_beam() const { return static_cast<int>(read(reg_bf_tx_awv_ptr)); }
  int rx_beam() const { return static_cast<int>(read(reg_bf_rx_awv_ptr)); }

  const std::map<std::string, std::uint32_t>& registers() const noexcept { return registers_; }
  const std::vector<spi_transaction>& spi_log() const noexcept { return spi_log_; }
  const std::vector<mode_event>& mode_log() const noexcept { return mode_log_; }
  const transceiver_config& config() const noexcept { return config_; }
  const beam_codebook& codebook() const noexcept { return *codebook_; }
  int initial_beam() const noexcept { return initial_beam_; }

  // One JSON object per line: time, register, value, chip_select (+ address if requested).
  void export_log(std::ostream& out, bool with_addresses = false) const;

  static transceiver replay(transceiver_config config,
                            std::shared_ptr<const beam_codebook> codebook, int initial_beam,
                            const std::vector<spi_transaction>& log);

 private:
  transceiver_config config_;
  std::shared_ptr<const beam_codebook> codebook_;
  int initial_beam_;
  std::map<std::string, std::uint32_t> registers_;
  trx_mode mode_ = trx_mode::idle;
  std::vector<spi_transaction> spi_log_;
  std::vector<mode_event> mode_log_;
};

}  // namespace beamlab
