public void Trace(Request request)
{
    if (_logger.IsEnabled(LogLevel.Debug))
        _logger.LogDebug("Handling {0}", request.Describe());
    Handle(request);
}
