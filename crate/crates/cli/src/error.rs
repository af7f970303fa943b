use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag, config key or value. Exit code 2.
    Usage { flag: String, message: String },
    /// The simulation itself failed. Exit code 1.
    Simulation(neuroquant::Error),
    /// Writing output failed. Exit code 1.
    Io(String),
}

impl CliError {
    pub fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage { flag: flag.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Simulation(_) | CliError::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let v = match self {
            CliError::Usage { flag, message } => json!({ "error": "usage", "flag": flag, "message": message }),
            CliError::Simulation(e) => json!({ "error": "simulation", "message": e.to_string() }),
            CliError::Io(m) => json!({ "error": "io", "message": m }),
        };
        v.to_string()
    }
}

impl From<neuroquant::Error> for CliError {
    fn from(e: neuroquant::Error) -> Self {
        CliError::Simulation(e)
    }
}
