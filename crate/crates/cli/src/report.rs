use serde_json::{json, Map, Value};

/// One named result, with an optional witness and the caps it was computed under.
pub struct Verdict {
    name: String,
    value: Value,
    witness: Option<Value>,
    caps: Option<Value>,
}

impl Verdict {
    pub fn new(name: &str, value: impl Into<Value>) -> Self {
        Verdict {
            name: name.to_string(),
            value: value.into(),
            witness: None,
            caps: None,
        }
    }

    pub fn witness(mut self, w: impl Into<Value>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn caps(mut self, c: Value) -> Self {
        self.caps = Some(c);
        self
    }

    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("value".into(), self.value.clone());
        if let Some(w) = &self.witness {
            m.insert("witness".into(), w.clone());
        }
        if let Some(c) = &self.caps {
            m.insert("caps".into(), c.clone());
        }
        Value::Object(m)
    }
}

/// The structured document printed for every invocation.
pub struct Report {
    command: String,
    inputs: Map<String, Value>,
    verdicts: Vec<Verdict>,
    summary: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Map::new(),
            verdicts: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    /// Adds a line to the human-readable summary.
    pub fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    pub fn summary(&self) -> &[String] {
        &self.summary
    }

    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": Value::Object(self.inputs.clone()),
            "verdicts": self.verdicts.iter().map(Verdict::to_value).collect::<Vec<_>>(),
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn render(&self, compact: bool) -> String {
        let v = self.to_value();
        if compact {
            serde_json::to_string(&v).expect("report serializes")
        } else {
            serde_json::to_string_pretty(&v).expect("report serializes")
        }
    }
}

/// Large naturals are emitted as strings once they leave the `u64` range.
pub fn big(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(small) => json!(small),
        Err(_) => Value::String(x.to_string()),
    }
}
