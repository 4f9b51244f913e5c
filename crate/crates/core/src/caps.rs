use serde::{Deserialize, Serialize};

/// Size limits that turn runaway instances into errors instead of hangs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Maximum number of columns handed to a nullspace or rank computation.
    pub nullspace_cols: usize,
    /// Maximum order of an enumerated group.
    pub group_order: usize,
    /// Maximum number of points at a single level of a tower.
    pub tower_points: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            nullspace_cols: 5000,
            group_order: 200_000,
            tower_points: 100_000,
        }
    }
}

impl Caps {
    pub const ENV_NULLSPACE: &'static str = "BERNSTEIN_NULLSPACE_CAP";
    pub const ENV_GROUP: &'static str = "BERNSTEIN_GROUP_CAP";
    pub const ENV_TOWER: &'static str = "BERNSTEIN_TOWER_CAP";

    /// Defaults overridden by the `BERNSTEIN_*_CAP` environment variables.
    pub fn from_env() -> std::result::Result<Self, String> {
        let mut caps = Caps::default();
        for (var, slot) in [
            (Self::ENV_NULLSPACE, &mut caps.nullspace_cols),
            (Self::ENV_GROUP, &mut caps.group_order),
            (Self::ENV_TOWER, &mut caps.tower_points),
        ] {
            if let Ok(raw) = std::env::var(var) {
                *slot = raw
                    .trim()
                    .parse()
                    .map_err(|_| format!("{var}={raw:?} is not a non-negative integer"))?;
            }
        }
        Ok(caps)
    }
}
