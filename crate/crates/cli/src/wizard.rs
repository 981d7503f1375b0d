//! Question-and-answer pipeline construction.
//!
//! Prompts go to `out`; answers are read one line at a time from `input`,
//! which is either the terminal or an answers file. A bad answer is
//! reported and the same question asked again. End of input aborts.

use std::io::{BufRead, Write};

use exekg::builder::{EntityRef, PipelineBuilder, TaskSpec};
use exekg::pipeline::PipelineKG;
use exekg::rdf::{Iri, Literal};
use exekg::schema::{DataStructure, InputRole, Schema};
use exekg::tabular::{load_csv, ColumnData, Table};

#[derive(Debug)]
pub enum WizardError {
    /// Input ended before the pipeline was complete.
    Eof,
    Io(std::io::Error),
    /// The pipeline name itself is unusable.
    Setup(String),
}

impl From<std::io::Error> for WizardError {
    fn from(e: std::io::Error) -> Self {
        WizardError::Io(e)
    }
}

type Res<T> = Result<T, WizardError>;

pub struct Wizard<'a, R, W> {
    schema: &'a Schema,
    input: R,
    out: W,
    /// Echo answers after prompts, for scripted sessions.
    echo: bool,
}

enum Choice<T> {
    Picked(T),
    Done,
}

impl<'a, R: BufRead, W: Write> Wizard<'a, R, W> {
    pub fn new(schema: &'a Schema, input: R, out: W, echo: bool) -> Self {
        Wizard {
            schema,
            input,
            out,
            echo,
        }
    }

    fn ask(&mut self, prompt: &str) -> Res<String> {
        write!(self.out, "{prompt}: ")?;
        self.out.flush()?;
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            writeln!(self.out)?;
            return Err(WizardError::Eof);
        }
        let answer = line.trim().to_string();
        if self.echo {
            writeln!(self.out, "{answer}")?;
        }
        Ok(answer)
    }

    fn say(&mut self, msg: impl std::fmt::Display) -> Res<()> {
        writeln!(self.out, "{msg}")?;
        Ok(())
    }

    /// Picks from `options` by 1-based number or local name.
    fn pick(&mut self, what: &str, options: &[Iri], allow_done: bool) -> Res<Choice<Iri>> {
        for (i, o) in options.iter().enumerate() {
            let label = self.schema.label(o).unwrap_or("");
            self.say(format!("  {:>2}. {:<28} {label}", i + 1, o.local_name()))?;
        }
        let prompt = if allow_done {
            format!("{what} (number or name, empty or `done` to finish)")
        } else {
            format!("{what} (number or name)")
        };
        loop {
            let a = self.ask(&prompt)?;
            if allow_done && (a.is_empty() || a == "done") {
                return Ok(Choice::Done);
            }
            let found = match a.parse::<usize>() {
                Ok(n) => n.checked_sub(1).and_then(|i| options.get(i)),
                Err(_) => options.iter().find(|o| o.local_name() == a || o.as_str() == a),
            };
            match found {
                Some(o) => return Ok(Choice::Picked(o.clone())),
                None => self.say(format!("`{a}` is not one of the listed choices"))?,
            }
        }
    }

    pub fn run(&mut self, name: &str) -> Res<PipelineKG> {
        let path = loop {
            let p = self.ask("Dataset path (CSV)")?;
            if !p.is_empty() {
                break p;
            }
            self.say("a dataset path is required")?;
        };
        let table = match load_csv(&path) {
            Ok(t) => {
                let cols: Vec<String> = t
                    .columns()
                    .iter()
                    .map(|c| {
                        let kind = if c.data.is_numeric() { "numeric" } else { "categorical" };
                        format!("{} ({kind})", c.name)
                    })
                    .collect();
                self.say(format!("columns: {}", cols.join(", ")))?;
                Some(t)
            }
            Err(e) => {
                self.say(format!("note: cannot read the dataset here ({e}); columns are not checked"))?;
                None
            }
        };
        let mut b = PipelineBuilder::with_schema(self.schema, name, &path)
            .map_err(|e| WizardError::Setup(e.to_string()))?;
        self.columns(&mut b, table.as_ref())?;
        let task_types: Vec<Iri> = self.schema.task_types().iter().cloned().collect();
        loop {
            self.say("Task types:")?;
            let task = match self.pick("Task type", &task_types, true)? {
                Choice::Picked(t) => t,
                Choice::Done if b.task_count() == 0 => {
                    self.say("add at least one task")?;
                    continue;
                }
                Choice::Done => break,
            };
            let spec = self.task(&b, &task)?;
            match b.add_task(spec) {
                Ok(t) => self.say(format!("added {}", t.iri.local_name()))?,
                Err(e) => self.say(format!("task rejected:\n{e}"))?,
            }
        }
        match b.finalize() {
            Ok(kg) => Ok(kg),
            // Inputs always come from existing entities, so this is not
            // expected; surface it rather than write a broken file.
            Err(e) => Err(WizardError::Setup(e.to_string())),
        }
    }

    fn columns(&mut self, b: &mut PipelineBuilder<'_>, table: Option<&Table>) -> Res<()> {
        loop {
            let a = self.ask("Columns to expose (comma-separated, `column[:semantics]`)")?;
            let mut parsed = Vec::new();
            let mut problem = None;
            for item in a.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (col, sem) = item.split_once(':').unwrap_or((item, ""));
                let structure = match table.map(|t| t.column(col)) {
                    Some(None) => {
                        problem = Some(format!("the dataset has no column `{col}`"));
                        break;
                    }
                    Some(Some(c)) => match c.data {
                        ColumnData::Numeric(_) => DataStructure::NumericColumn,
                        ColumnData::Categorical(_) => DataStructure::CategoricalColumn,
                    },
                    None => DataStructure::NumericColumn,
                };
                parsed.push((col.to_string(), sem.to_string(), structure));
            }
            if problem.is_none() && parsed.is_empty() {
                problem = Some("expose at least one column".to_string());
            }
            if let Some(p) = problem {
                self.say(p)?;
                continue;
            }
            // Validate on a scratch builder so a bad item leaves no trace.
            let mut trial = b.clone();
            let res = parsed
                .iter()
                .try_for_each(|(c, s, d)| trial.create_data_entity(c, c, *d, s).map(|_| ()));
            match res {
                Ok(()) => {
                    *b = trial;
                    return Ok(());
                }
                Err(e) => self.say(e)?,
            }
        }
    }

    fn task(&mut self, b: &PipelineBuilder<'_>, task: &Iri) -> Res<TaskSpec> {
        let methods: Vec<Iri> = self
            .schema
            .methods_for_task(task)
            .map(|m| m.iter().cloned().collect())
            .unwrap_or_default();
        self.say("Methods:")?;
        let Choice::Picked(method) = self.pick("Method", &methods, false)? else {
            unreachable!("done is not offered")
        };
        let mut spec = TaskSpec::new(task.as_str(), method.as_str());
        let io = self.schema.io_spec(task).cloned().unwrap_or_default();
        for role in &io.inputs {
            for e in self.inputs(b, role)? {
                spec = spec.input(role.property.as_str(), &e);
            }
        }
        for p in self.schema.param_specs(&method).to_vec() {
            let hint = match (&p.default, p.required) {
                (Some(d), _) => format!("default {}", d.lexical()),
                (None, true) => "required".to_string(),
                (None, false) => "optional".to_string(),
            };
            let dt = p.datatype.iri().rsplit('#').next().unwrap_or("");
            loop {
                let a = self.ask(&format!("{} [{dt}, {hint}]", p.property.local_name()))?;
                if a.is_empty() {
                    if p.required {
                        self.say("a value is required")?;
                        continue;
                    }
                    break;
                }
                match Literal::new(a.as_str(), p.datatype) {
                    Ok(l) => {
                        spec = spec.param(p.property.as_str(), l);
                        break;
                    }
                    Err(_) => self.say(format!("`{a}` is not a valid {dt}"))?,
                }
            }
        }
        for role in &io.outputs {
            loop {
                let a = self.ask(&format!("Name for the {} output", role.property.local_name()))?;
                if a.is_empty() {
                    self.say("a name is required")?;
                } else if b.entity(&a).is_some() {
                    self.say(format!("an entity named `{a}` already exists"))?;
                } else {
                    spec = spec.output(a);
                    break;
                }
            }
        }
        Ok(spec)
    }

    fn inputs(&mut self, b: &PipelineBuilder<'_>, role: &InputRole) -> Res<Vec<EntityRef>> {
        let fitting: Vec<&String> = b
            .entities()
            .iter()
            .filter(|(_, e)| role.accepts.contains(&e.structure))
            .map(|(n, _)| n)
            .collect();
        let names: Vec<&str> = fitting.iter().map(|s| s.as_str()).collect();
        let bounds = match role.max {
            Some(max) if max == role.min => format!("{max}"),
            Some(max) => format!("{}..{max}", role.min),
            None => format!("{} or more", role.min),
        };
        let prompt = format!(
            "{} ({bounds}; from: {})",
            role.property.local_name(),
            if names.is_empty() { "none available".to_string() } else { names.join(", ") }
        );
        loop {
            let a = self.ask(&prompt)?;
            let picked: Vec<&str> = a.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            if picked.len() < role.min || role.max.is_some_and(|m| picked.len() > m) {
                self.say(format!("expected {bounds} entities, got {}", picked.len()))?;
                continue;
            }
            let mut out = Vec::new();
            let mut bad = None;
            for n in picked {
                match b.entity(n) {
                    Some(e) if role.accepts.contains(&e.structure) => out.push(e.clone()),
                    Some(e) => {
                        bad = Some(format!("`{n}` is a {}, which {} does not accept", e.structure, role.property.local_name()));
                        break;
                    }
                    None => {
                        bad = Some(format!("no entity named `{n}`"));
                        break;
                    }
                }
            }
            match bad {
                Some(m) => self.say(m)?,
                None => return Ok(out),
            }
        }
    }
}
