use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {field}: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

/// Scenario scalars for one uplink frame.
///
/// Devices and slots are indexed from zero throughout the crate. The number
/// of mirror activation patterns is `2^mirrors` and is derived, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Total number of devices `K`.
    pub devices: usize,
    /// Number of active devices `K_a`.
    pub active: usize,
    /// RF mirrors per device `M_r`.
    pub mirrors: u32,
    /// Conventional QAM order `M` (4 or 16).
    pub qam_order: usize,
    /// Receive antennas `N_r`.
    pub rx_antennas: usize,
    /// Slots per frame `J`.
    pub slots: usize,
    /// Per-device transmit SNR, `10 log10(1 / sigma_w^2)`.
    pub snr_db: f64,
    /// Residual-decrease stopping threshold of the activity detector.
    pub threshold: f64,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            devices: 100,
            active: 8,
            mirrors: 2,
            qam_order: 4,
            rx_antennas: 50,
            slots: 12,
            snr_db: 2.0,
            threshold: 2.0,
            seed: 0,
        }
    }
}

impl SystemConfig {
    /// Mirror activation patterns per device, `N_t = 2^M_r`.
    pub fn maps(&self) -> usize {
        1usize << self.mirrors
    }

    pub fn qam_bits(&self) -> u32 {
        self.qam_order.trailing_zeros()
    }

    /// Bits per channel use, `M_r + log2 M`.
    pub fn bits_per_symbol(&self) -> u32 {
        self.mirrors + self.qam_bits()
    }

    /// Columns of the aggregate channel, `K * N_t`.
    pub fn columns(&self) -> usize {
        self.devices * self.maps()
    }

    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.devices == 0 {
            return Err(ConfigError::new("K", "must be at least 1"));
        }
        if self.active > self.devices {
            return Err(ConfigError::new(
                "Ka",
                format!("{} active devices exceed K = {}", self.active, self.devices),
            ));
        }
        if self.mirrors == 0 || self.mirrors > 8 {
            return Err(ConfigError::new("Mr", "must be in 1..=8"));
        }
        if !matches!(self.qam_order, 4 | 16) {
            return Err(ConfigError::new("M", "QAM order must be 4 or 16"));
        }
        if self.rx_antennas == 0 {
            return Err(ConfigError::new("Nr", "must be at least 1"));
        }
        if self.slots == 0 {
            return Err(ConfigError::new("J", "must be at least 1"));
        }
        if self.snr_db.is_nan() {
            return Err(ConfigError::new("snr_db", "must be a number"));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(ConfigError::new("P_th", "must be positive and finite"));
        }
        Ok(())
    }
}
