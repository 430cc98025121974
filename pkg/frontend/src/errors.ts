/** Typed errors mirroring the core taxonomy, mapped from CLI exit codes. */

export class KcdmError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** Bad key/nonce material or invalid options (core exit code 2). */
export class InvalidArgumentsError extends KcdmError {}

/** Malformed or truncated tensor/container bytes (core exit code 3). */
export class FormatError extends KcdmError {}

/** Resolved system failed the positive-Lyapunov gate (core exit code 4). */
export class ChaosVerificationError extends KcdmError {}

/** Container fingerprint does not match its options block (core exit code 5). */
export class ConfigMismatchError extends KcdmError {}

/** The kcdm CLI could not be located or spawned. */
export class CliUnavailableError extends KcdmError {}

export function errorForExit(code: number, stderr: string): KcdmError {
  const detail = stderr.trim() || `kcdm exited with code ${code}`;
  switch (code) {
    case 2:
      return new InvalidArgumentsError(detail);
    case 3:
      return new FormatError(detail);
    case 4:
      return new ChaosVerificationError(detail);
    case 5:
      return new ConfigMismatchError(detail);
    default:
      return new KcdmError(detail);
  }
}
