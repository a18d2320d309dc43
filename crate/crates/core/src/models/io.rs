//! Binary model container. The layout is documented in `docs/MODEL_FORMAT.md`.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::{SparseFeatureVector, Vocabulary};
use crate::scalar::Scalar;

use super::{
    LogisticRegression, LrParams, LrSchedule, LrSolver, Model, ModelKind, NaiveBayes, Svm, TrainedModel,
    TrainingReport,
};

pub const MAGIC: [u8; 4] = *b"SSDM";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 32 + 8;
const CHECKSUM_LEN: usize = 32;

fn bad(msg: impl Into<String>) -> Error {
    Error::ModelFormat(msg.into())
}

struct Writer<F> {
    buf: Vec<u8>,
    _scalar: std::marker::PhantomData<F>,
}

impl<F: Scalar> Writer<F> {
    fn new() -> Self {
        Writer {
            buf: Vec::new(),
            _scalar: std::marker::PhantomData,
        }
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f(&mut self, v: F) {
        v.write_le(&mut self.buf);
    }

    fn fs(&mut self, vs: &[F]) {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.f(v);
        }
    }

    fn bytes(&mut self, b: &[u8]) {
        self.u64(b.len() as u64);
        self.buf.extend_from_slice(b);
    }
}

struct Reader<'a, F> {
    buf: &'a [u8],
    pos: usize,
    _scalar: std::marker::PhantomData<F>,
}

impl<'a, F: Scalar> Reader<'a, F> {
    fn new(buf: &'a [u8]) -> Self {
        Reader {
            buf,
            pos: 0,
            _scalar: std::marker::PhantomData,
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| bad("payload ends early"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self, elem: usize) -> Result<usize> {
        let n = self.u64()?;
        let n = usize::try_from(n).map_err(|_| bad("length overflows"))?;
        if n.checked_mul(elem).is_none_or(|b| b > self.buf.len() - self.pos) {
            return Err(bad("length exceeds payload"));
        }
        Ok(n)
    }

    fn f(&mut self) -> Result<F> {
        Ok(F::read_le(self.take(F::byte_width())?))
    }

    fn fs(&mut self) -> Result<Vec<F>> {
        let n = self.len(F::byte_width())?;
        (0..n).map(|_| self.f()).collect()
    }

    fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.len(1)?;
        self.take(n)
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(bad("trailing bytes after the model parameters"))
        }
    }
}

fn write_params<F: Scalar>(w: &mut Writer<F>, model: &Model<F>) {
    match model {
        Model::NaiveBayes(m) => {
            w.f(m.alpha);
            w.fs(&m.log_prior);
            w.fs(&m.log_likelihood[0]);
            w.fs(&m.log_likelihood[1]);
        }
        Model::LogisticRegression(m) => {
            w.f(m.params.l2);
            w.u32(m.params.epochs);
            w.f(m.params.learning_rate);
            w.u8(m.params.schedule.code());
            w.u8(m.params.solver.code());
            w.fs(&m.weights);
            w.f(m.bias);
            w.fs(&m.objective_history);
        }
        Model::Svm(m) => {
            w.f(m.c);
            w.f(m.gamma);
            w.f(m.tol);
            w.f(m.bias);
            w.u8(m.converged as u8);
            w.u32(m.passes);
            w.u64(m.steps);
            w.u64(m.n_support() as u64);
            for ((sv, &a), &l) in m.support_vectors.iter().zip(&m.alphas).zip(&m.sv_labels) {
                w.u8(l as u8);
                w.f(a);
                w.u32(sv.nnz() as u32);
                for &(id, c) in sv.pairs() {
                    w.u32(id);
                    w.u32(c);
                }
            }
        }
    }
}

fn read_params<F: Scalar>(r: &mut Reader<'_, F>, kind: ModelKind) -> Result<Model<F>> {
    Ok(match kind {
        ModelKind::NaiveBayes => {
            let alpha = r.f()?;
            let prior = r.fs()?;
            let neg = r.fs()?;
            let pos = r.fs()?;
            if prior.len() != 2 {
                return Err(bad("naive Bayes needs two priors"));
            }
            let m = NaiveBayes {
                log_prior: [prior[0], prior[1]],
                log_likelihood: [neg, pos],
                alpha,
            };
            m.validate()?;
            Model::NaiveBayes(m)
        }
        ModelKind::LogisticRegression => {
            let l2 = r.f()?;
            let epochs = r.u32()?;
            let learning_rate = r.f()?;
            let schedule = LrSchedule::from_code(r.u8()?).ok_or_else(|| bad("unknown schedule"))?;
            let solver = LrSolver::from_code(r.u8()?).ok_or_else(|| bad("unknown solver"))?;
            let weights = r.fs()?;
            let bias = r.f()?;
            let objective_history = r.fs()?;
            let m = LogisticRegression {
                weights,
                bias,
                params: LrParams {
                    l2,
                    epochs,
                    learning_rate,
                    schedule,
                    solver,
                },
                objective_history,
            };
            m.validate()?;
            Model::LogisticRegression(m)
        }
        ModelKind::Svm => {
            let c = r.f()?;
            let gamma = r.f()?;
            let tol = r.f()?;
            let bias = r.f()?;
            let converged = match r.u8()? {
                0 => false,
                1 => true,
                _ => return Err(bad("bad convergence flag")),
            };
            let passes = r.u32()?;
            let steps = r.u64()?;
            let n = r.len(1 + F::byte_width() + 4)?;
            let mut svs = Vec::with_capacity(n);
            let mut alphas = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                labels.push(r.u8()? as i8);
                alphas.push(r.f()?);
                let nnz = r.u32()? as usize;
                let pairs = (0..nnz)
                    .map(|_| Ok((r.u32()?, r.u32()?)))
                    .collect::<Result<Vec<_>>>()?;
                svs.push(SparseFeatureVector::new(pairs).map_err(|e| bad(format!("support vector: {e}")))?);
            }
            Model::Svm(Svm::from_parts(svs, alphas, labels, bias, gamma, c, tol, converged, passes, steps)?)
        }
    })
}

/// Scalar width (4 or 8) recorded in a model file, read without decoding it.
pub fn stored_precision(bytes: &[u8]) -> Result<u8> {
    if bytes.len() < HEADER_LEN || bytes[..4] != MAGIC {
        return Err(bad("not a model file"));
    }
    Ok(bytes[6])
}

impl<F: Scalar> TrainedModel<F> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut payload = Writer::<F>::new();
        payload.bytes(&serde_json::to_vec(&self.report).expect("report serializes"));
        payload.bytes(self.vocabulary.dump_string().as_bytes());
        write_params(&mut payload, &self.model);

        let mut out = Vec::with_capacity(HEADER_LEN + payload.buf.len() + CHECKSUM_LEN);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(F::TAG);
        out.push(self.model.kind().code());
        out.extend_from_slice(&self.vocabulary.hash());
        out.extend_from_slice(&(payload.buf.len() as u64).to_le_bytes());
        out.extend_from_slice(&payload.buf);
        let checksum = Sha256::digest(&out);
        out.extend_from_slice(&checksum);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN + CHECKSUM_LEN {
            return Err(bad("file is truncated"));
        }
        if bytes[..4] != MAGIC {
            return Err(bad("bad magic bytes; not a model file"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(bad(format!(
                "format version {version} is not supported (expected {FORMAT_VERSION})"
            )));
        }
        if bytes[6] != F::TAG {
            return Err(bad(format!(
                "file stores {}-byte scalars but {}-byte scalars were requested",
                bytes[6],
                F::TAG
            )));
        }
        let kind = ModelKind::from_code(bytes[7]).ok_or_else(|| bad(format!("unknown model kind {}", bytes[7])))?;
        let vocab_hash: [u8; 32] = bytes[8..40].try_into().unwrap();
        let payload_len = u64::from_le_bytes(bytes[40..48].try_into().unwrap());
        let expected = (HEADER_LEN as u64)
            .checked_add(payload_len)
            .and_then(|v| v.checked_add(CHECKSUM_LEN as u64));
        if expected != Some(bytes.len() as u64) {
            return Err(bad("file length does not match the recorded payload length"));
        }
        let body_end = bytes.len() - CHECKSUM_LEN;
        if Sha256::digest(&bytes[..body_end]).as_slice() != &bytes[body_end..] {
            return Err(bad("checksum mismatch; the file is corrupt"));
        }

        let mut r = Reader::<F>::new(&bytes[HEADER_LEN..body_end]);
        let report: TrainingReport = serde_json::from_slice(r.bytes()?).map_err(|e| bad(format!("report: {e}")))?;
        let dump = std::str::from_utf8(r.bytes()?).map_err(|_| bad("vocabulary is not UTF-8"))?;
        let vocabulary = Vocabulary::parse_dump("model vocabulary", dump).map_err(|e| bad(format!("{e}")))?;
        if vocabulary.hash() != vocab_hash {
            return Err(bad("vocabulary hash does not match the header"));
        }
        let model = read_params(&mut r, kind)?;
        r.finish()?;
        if report.model != kind {
            return Err(bad("report and header disagree on the model kind"));
        }
        let dim_ok = match &model {
            Model::NaiveBayes(m) => m.dim() == vocabulary.len(),
            Model::LogisticRegression(m) => m.dim() == vocabulary.len(),
            Model::Svm(m) => m
                .support_vectors
                .iter()
                .filter_map(SparseFeatureVector::max_id)
                .all(|id| (id as usize) < vocabulary.len()),
        };
        if !dim_ok {
            return Err(bad("model dimension does not match the vocabulary"));
        }
        Ok(TrainedModel {
            model,
            vocabulary,
            report,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
